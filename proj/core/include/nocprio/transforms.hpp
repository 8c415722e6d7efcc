#pragma once

#include "nocprio/moments.hpp"

namespace nocprio {

struct ClassFlow {
    ArrivalFlow flow;
    ServiceMoments service;
};

// Two flows share the high-priority queue; one of them (`shared`) then
// contends with a freshly injected low-priority flow at a common server while
// the other (`diverted`) leaves through a separate output.
struct SplitHighInput {
    ClassFlow shared;
    ClassFlow diverted;
    ClassFlow injected;
};

// One high-priority flow contends with `contender` at a common server;
// `diverted` shares the low-priority queue but leaves elsewhere.
struct SplitLowInput {
    ClassFlow high;
    ClassFlow diverted;
    ClassFlow contender;
};

// How the residual of the thinned high-priority departure stream is formed.
//   discrete: exact discrete-time Geo/G/1 residual driven by the thinned
//             stream's cv2, departure utilization taken as the share the
//             bystanders occupy while the shared flow is absent, and the
//             time-average residual used for the low-priority arrival;
//   printed:  the published continuous-style expression with a halved
//             cv2 sum and a -rho*mu/2 correction, full queue utilization.
enum class ResidualForm { discrete, printed };

struct StructuralResult {
    double shared_departure_cv2;
    double shared_residual;       // residual of the thinned shared stream
    double shared_wait;           // shared flow behind the transformed queue
    double injected_wait;
    double diverted_wait;
};

struct ServiceRateResult {
    double high_wait;
    double contender_wait_unsplit;  // contender wait with no diverted traffic
    double delay_probability;
    double service_extension;       // extra busy time per contender flit
    ServiceMoments modified_service;
    double modified_utilization;
    double modified_residual;
    double diverted_wait;
    double contender_wait;
};

// Residual of a flow with given arrival cv2 in a discrete-time single-server
// queue; reduces to residual_geo_g1 when cv2 = 1 - rate.
double queueing_residual(double rate, double arrival_cv2, const ServiceMoments& svc);

StructuralResult structural_transform(const SplitHighInput& in,
                                      ResidualForm form = ResidualForm::discrete);

ServiceRateResult service_rate_transform(const SplitLowInput& in);

// Moments of the service time of a rate-weighted mixture of two classes.
ServiceMoments mixture_service(const ClassFlow& a, const ClassFlow& b);

}  // namespace nocprio
