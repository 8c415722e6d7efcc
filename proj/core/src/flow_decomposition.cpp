#include "nocprio/flow_decomposition.hpp"

#include <string>

#include "nocprio/errors.hpp"

namespace nocprio {

ArrivalFlow merge_flows(std::span<const ArrivalFlow> flows) {
    if (flows.empty())
        throw DomainError("cannot merge an empty flow set");
    if (flows.size() == 1)
        return flows.front();
    double rate = 0.0;
    double weighted = 0.0;
    for (const auto& f : flows) {
        rate += f.rate();
        weighted += f.rate() * f.cv2();
    }
    if (rate >= 1.0)
        throw DomainError("merged rate " + std::to_string(rate) + " is not below 1");
    if (rate == 0.0)
        return ArrivalFlow(0.0, 1.0);
    return ArrivalFlow(rate, weighted / rate);
}

double departure_cv2(const ArrivalFlow& merged, const ServiceMoments& svc, double rho) {
    if (rho >= 1.0)
        throw StabilityError("server", "departure process undefined at utilization " + std::to_string(rho));
    if (rho < 0.0)
        throw DomainError("negative utilization " + std::to_string(rho));
    const double r2 = rho * rho;
    return (1.0 - r2) * merged.cv2() + r2 * svc.cv2();
}

double split_flow(double cv2_departure, double fraction) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw DomainError("split fraction must lie in (0,1], got " + std::to_string(fraction));
    return 1.0 + fraction * (cv2_departure - 1.0);
}

}  // namespace nocprio
