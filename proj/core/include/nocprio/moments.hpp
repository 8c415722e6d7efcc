#pragma once

namespace nocprio {

// First two moments of a service time, in cycles.
class ServiceMoments {
public:
    ServiceMoments(double mean, double second_moment);

    double mean() const noexcept { return mean_; }
    double second_moment() const noexcept { return second_moment_; }
    double cv2() const noexcept;
    bool deterministic() const noexcept { return second_moment_ == mean_ * mean_; }

    friend bool operator==(const ServiceMoments&, const ServiceMoments&) = default;

private:
    double mean_;
    double second_moment_;
};

// Arrival rate in flits/cycle and squared coefficient of variation of the
// inter-arrival time. A zero rate is admitted to express empty flows.
class ArrivalFlow {
public:
    ArrivalFlow(double rate, double cv2);

    double rate() const noexcept { return rate_; }
    double cv2() const noexcept { return cv2_; }

    friend bool operator==(const ArrivalFlow&, const ArrivalFlow&) = default;

private:
    double rate_;
    double cv2_;
};

// Bernoulli injection: geometric gaps on {1,2,...}, so cv2 = 1 - rate.
ArrivalFlow geometric_arrival(double rate);

ServiceMoments deterministic_service(int cycles);
ServiceMoments general_service(double mean, double second_moment);

// Mean residual service seen by an arrival in a discrete-time Geo/G/1 queue.
double residual_geo_g1(const ArrivalFlow& flow, const ServiceMoments& svc);

double utilization(const ArrivalFlow& flow, const ServiceMoments& svc);

}  // namespace nocprio
