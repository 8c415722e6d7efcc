#pragma once

#include <span>

#include "nocprio/moments.hpp"

namespace nocprio {

// Superposition of flows: rates add, cv2 is the rate-weighted mean.
ArrivalFlow merge_flows(std::span<const ArrivalFlow> flows);

// Inter-departure cv2 of a server with utilization `rho`.
double departure_cv2(const ArrivalFlow& merged, const ServiceMoments& svc, double rho);

// cv2 of the share `fraction` of a departure stream, thinned at random.
double split_flow(double cv2_departure, double fraction);

}  // namespace nocprio
