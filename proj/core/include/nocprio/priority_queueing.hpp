#pragma once

#include <vector>

#include "nocprio/moments.hpp"

namespace nocprio {

// Cumulative utilization at or above this is rejected as unstable.
inline constexpr double stability_limit = 0.999;

struct PriorityClassParams {
    int class_id;
    ArrivalFlow flow;
    ServiceMoments service;
    int rank;  // 1 is served first
};

// Classes sharing one non-preemptive server under strict priority.
class PriorityQueueSystem {
public:
    // Ranks must be distinct and contiguous from 1; input order is irrelevant.
    explicit PriorityQueueSystem(std::vector<PriorityClassParams> classes);

    const std::vector<PriorityClassParams>& classes() const noexcept { return classes_; }
    std::size_t size() const noexcept { return classes_.size(); }
    const PriorityClassParams& at_rank(int rank) const;

private:
    std::vector<PriorityClassParams> classes_;  // sorted by rank
};

// Residual time seen by a class-`rank` arrival, including the extra wait for
// higher ranks that arrive while it is queued.
double effective_residual(const PriorityQueueSystem& system, int rank);

// Mean waiting time (excluding own service) per rank, index 0 = rank 1.
std::vector<double> waiting_times_basic(const PriorityQueueSystem& system);

}  // namespace nocprio
