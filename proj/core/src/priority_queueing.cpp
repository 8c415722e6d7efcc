#include "nocprio/priority_queueing.hpp"

#include <algorithm>
#include <string>

#include "nocprio/errors.hpp"

namespace nocprio {

PriorityQueueSystem::PriorityQueueSystem(std::vector<PriorityClassParams> classes)
    : classes_(std::move(classes)) {
    std::sort(classes_.begin(), classes_.end(),
              [](const auto& a, const auto& b) { return a.rank < b.rank; });
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i].rank != static_cast<int>(i) + 1)
            throw DomainError("priority ranks must be distinct and contiguous from 1");
    }
}

const PriorityClassParams& PriorityQueueSystem::at_rank(int rank) const {
    if (rank < 1 || rank > static_cast<int>(classes_.size()))
        throw DomainError("priority rank " + std::to_string(rank) + " out of range");
    return classes_[rank - 1];
}

double effective_residual(const PriorityQueueSystem& system, int rank) {
    system.at_rank(rank);
    double total = 0.0;
    for (const auto& c : system.classes())
        total += residual_geo_g1(c.flow, c.service);
    for (int k = 1; k < rank; ++k) {
        const auto& c = system.at_rank(k);
        total += utilization(c.flow, c.service);
    }
    return total;
}

std::vector<double> waiting_times_basic(const PriorityQueueSystem& system) {
    double residual = 0.0;
    for (const auto& c : system.classes())
        residual += residual_geo_g1(c.flow, c.service);

    std::vector<double> waits;
    waits.reserve(system.size());
    double numerator = residual;
    double cumulative = 0.0;
    for (const auto& c : system.classes()) {
        const double rho = utilization(c.flow, c.service);
        cumulative += rho;
        if (cumulative >= stability_limit)
            throw StabilityError("rank " + std::to_string(c.rank),
                                 "cumulative utilization reaches " + std::to_string(cumulative) +
                                     " at rank " + std::to_string(c.rank));
        const double w = numerator / (1.0 - cumulative);
        waits.push_back(w);
        numerator += rho + rho * w;
    }
    return waits;
}

}  // namespace nocprio
