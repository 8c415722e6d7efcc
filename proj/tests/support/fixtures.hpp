#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nocprio/analysis.hpp>
#include <nocprio/network_model.hpp>
#include <nocprio/priority_queueing.hpp>
#include <nocprio/simulator.hpp>
#include <nocprio/traffic.hpp>
#include <nocprio/transforms.hpp>

namespace fixtures {

using namespace nocprio;

// Two sources feeding one high-priority and one low-priority queue that meet
// at a shared output; nodes 2 and 3 are sinks behind the shared and the
// private output.
struct SplitNetwork {
    NocModel model;
    QueueId high;
    QueueId low;
};

// Node 0 injects into the high queue toward 2 (shared) and 3 (diverted);
// node 1 injects into the low queue toward 2.
SplitNetwork split_high_network();
TrafficMatrix split_high_traffic(double shared, double diverted, double injected);

// Node 0 injects into the high queue toward 2; node 1 injects into the low
// queue toward 3 (diverted) and 2 (contender).
SplitNetwork split_low_network();
TrafficMatrix split_low_traffic(double high, double diverted, double contender);

// One queue per class, all competing for one output; queue k has level k.
NocModel priority_chain(int classes);
TrafficMatrix chain_traffic(const std::vector<double>& rates);

PriorityQueueSystem priority_system(const std::vector<double>& rates, int service = 2);

int class_of(const std::vector<TrafficClass>& classes, NodeId src, NodeId dst);

struct CheckResult {
    bool pass;
    int samples;
    std::string detail;
};

// Randomized invariant probes, each over `samples` stable draws.
CheckResult check_priority_ordering(int samples, std::uint64_t seed);
CheckResult check_priority_monotonicity(int samples, std::uint64_t seed);
CheckResult check_service_rate_monotonicity(int samples, std::uint64_t seed);
CheckResult check_structural_ordering(int samples, std::uint64_t seed);
CheckResult check_engine_monotonicity(int samples, std::uint64_t seed);

// Replays a trace and verifies FIFO order, strict priority across levels and
// that no server idles while an eligible head flit waits.
CheckResult check_trace(const NocModel& model, const TrafficMatrix& matrix, const std::string& trace);

}  // namespace fixtures
