#include "nocprio/transforms.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "nocprio/errors.hpp"
#include "nocprio/flow_decomposition.hpp"
#include "nocprio/priority_queueing.hpp"

namespace nocprio {

namespace {

double rho_of(const ClassFlow& c) { return utilization(c.flow, c.service); }
double residual_of(const ClassFlow& c) { return residual_geo_g1(c.flow, c.service); }

double guarded_slack(double used, const char* what) {
    if (used >= stability_limit)
        throw StabilityError(what, std::string(what) + " utilization reaches " + std::to_string(used));
    return 1.0 - used;
}

}  // namespace

double queueing_residual(double rate, double arrival_cv2, const ServiceMoments& svc) {
    const double rho = rate * svc.mean();
    const double r = 0.5 * rho * svc.mean() * (arrival_cv2 + svc.cv2()) - 0.5 * rho * (1.0 - rho);
    return std::max(0.0, r);
}

ServiceMoments mixture_service(const ClassFlow& a, const ClassFlow& b) {
    const double la = a.flow.rate();
    const double lb = b.flow.rate();
    if (la + lb == 0.0)
        return a.service;
    const double m = (la * a.service.mean() + lb * b.service.mean()) / (la + lb);
    const double m2 = (la * a.service.second_moment() + lb * b.service.second_moment()) / (la + lb);
    return ServiceMoments(m, std::max(m2, m * m));
}

StructuralResult structural_transform(const SplitHighInput& in, ResidualForm form) {
    const double rho_shared = rho_of(in.shared);
    const double rho_diverted = rho_of(in.diverted);
    const double rho_injected = rho_of(in.injected);
    guarded_slack(rho_shared + rho_diverted, "high-priority queue");
    guarded_slack(rho_shared + rho_injected, "shared server");
    if (in.shared.flow.rate() <= 0.0)
        throw DomainError("shared flow must have a positive rate");

    const std::array<ArrivalFlow, 2> parts{in.shared.flow, in.diverted.flow};
    const ArrivalFlow merged = merge_flows(parts);
    const ServiceMoments merged_service = mixture_service(in.shared, in.diverted);
    const double departure_rho = form == ResidualForm::printed
                                     ? rho_shared + rho_diverted
                                     : rho_diverted / (1.0 - rho_shared);
    const double cd2 = departure_cv2(merged, merged_service, departure_rho);
    const double cd2_shared = split_flow(cd2, in.shared.flow.rate() / merged.rate());

    const ServiceMoments& svc = in.shared.service;
    double shared_residual = 0.0;
    if (form == ResidualForm::printed) {
        const double mu = 1.0 / svc.mean();
        shared_residual = 0.5 * (rho_shared / mu) * ((cd2_shared + svc.cv2()) / 2.0) - rho_shared * mu / 2.0;
    } else {
        shared_residual = queueing_residual(in.shared.flow.rate(), cd2_shared, svc);
    }

    const double r_injected = residual_of(in.injected);
    const double shared_wait = (shared_residual + r_injected) / guarded_slack(rho_shared, "shared flow");
    const double seen_by_injected = form == ResidualForm::printed ? shared_residual : residual_of(in.shared);
    const double injected_wait = (seen_by_injected + r_injected + rho_shared + rho_shared * shared_wait) /
                                 (1.0 - rho_shared - rho_injected);
    const double diverted_wait =
        (residual_of(in.diverted) + residual_of(in.shared)) / guarded_slack(rho_diverted, "diverted flow");

    return {cd2_shared, shared_residual, shared_wait, injected_wait, diverted_wait};
}

ServiceRateResult service_rate_transform(const SplitLowInput& in) {
    const double rho_high = rho_of(in.high);
    const double rho_contender = rho_of(in.contender);
    const double rho_diverted = rho_of(in.diverted);
    const double r_high = residual_of(in.high);
    const double r_contender = residual_of(in.contender);
    const double r_diverted = residual_of(in.diverted);

    const double high_wait = (r_high + r_contender) / guarded_slack(rho_high, "high-priority flow");
    const double unsplit = (r_high + r_contender + rho_high + rho_high * high_wait) /
                           guarded_slack(rho_high + rho_contender, "shared server");

    const double p = rho_high + in.high.flow.rate() * r_contender;
    if (p >= 1.0)
        throw StabilityError("contender", "blocking probability reaches " + std::to_string(p));
    const double extension = in.high.service.mean() * p / (1.0 - p);

    const double t_star = in.contender.service.mean() + extension;
    const double variance = in.contender.service.second_moment() -
                            in.contender.service.mean() * in.contender.service.mean();
    const ServiceMoments modified(t_star, t_star * t_star + variance);
    const double rho_star = in.contender.flow.rate() * t_star;
    const double r_star = (1.0 - rho_star) * (unsplit - extension);
    const double diverted_wait =
        (r_star + r_diverted) / guarded_slack(rho_star + rho_diverted, "low-priority queue");

    return {high_wait, unsplit, p, extension, modified, rho_star, r_star, diverted_wait,
            diverted_wait + extension};
}

}  // namespace nocprio
