#include "nocprio/moments.hpp"

#include <cmath>
#include <sstream>

#include "nocprio/errors.hpp"

namespace nocprio {

namespace {

std::string describe(const char* what, double v) {
    std::ostringstream os;
    os << what << " = " << v;
    return os.str();
}

}  // namespace

ServiceMoments::ServiceMoments(double mean, double second_moment)
    : mean_(mean), second_moment_(second_moment) {
    if (!std::isfinite(mean) || mean < 1.0)
        throw DomainError(describe("service mean must be >= 1 cycle, got mean", mean));
    if (!std::isfinite(second_moment) || second_moment < mean * mean)
        throw DomainError(describe("service second moment below mean^2, got second moment", second_moment));
}

double ServiceMoments::cv2() const noexcept {
    return (second_moment_ - mean_ * mean_) / (mean_ * mean_);
}

ArrivalFlow::ArrivalFlow(double rate, double cv2) : rate_(rate), cv2_(cv2) {
    if (!std::isfinite(rate) || rate < 0.0 || rate >= 1.0)
        throw DomainError(describe("arrival rate must lie in [0,1), got rate", rate));
    if (!std::isfinite(cv2) || cv2 < 0.0)
        throw DomainError(describe("arrival cv2 must be >= 0, got cv2", cv2));
}

ArrivalFlow geometric_arrival(double rate) {
    if (!(rate > 0.0 && rate < 1.0))
        throw DomainError(describe("geometric arrival rate must lie in (0,1), got rate", rate));
    return ArrivalFlow(rate, 1.0 - rate);
}

ServiceMoments deterministic_service(int cycles) {
    if (cycles < 1)
        throw DomainError(describe("deterministic service must be >= 1 cycle, got T", cycles));
    const double t = cycles;
    return ServiceMoments(t, t * t);
}

ServiceMoments general_service(double mean, double second_moment) {
    return ServiceMoments(mean, second_moment);
}

double residual_geo_g1(const ArrivalFlow& flow, const ServiceMoments& svc) {
    return 0.5 * flow.rate() * (svc.second_moment() - svc.mean());
}

double utilization(const ArrivalFlow& flow, const ServiceMoments& svc) {
    return flow.rate() * svc.mean();
}

}  // namespace nocprio
