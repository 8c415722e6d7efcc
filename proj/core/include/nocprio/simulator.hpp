#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "nocprio/network_model.hpp"
#include "nocprio/report.hpp"
#include "nocprio/traffic.hpp"

namespace nocprio {

struct SimConfig {
    std::uint64_t total_cycles = 1'000'000;
    std::uint64_t warmup_cycles = 5000;
    std::uint64_t seed = 1;
    // When set, every event is logged as `cycle,event,queue,class,flit_id`.
    std::ostream* trace = nullptr;
    // Diagnostic hook: these sources inject every k cycles instead of at
    // random, cycling through their classes.
    std::map<NodeId, int> periodic_sources;
};

class RunningStat {
public:
    void add(double x) noexcept {
        ++count_;
        sum_ += x;
        sum_sq_ += x * x;
    }
    std::uint64_t count() const noexcept { return count_; }
    double sum() const noexcept { return sum_; }
    double mean() const noexcept { return count_ ? sum_ / static_cast<double>(count_) : 0.0; }
    double variance() const noexcept;
    double cv2() const noexcept;

    friend bool operator==(const RunningStat&, const RunningStat&) = default;

private:
    std::uint64_t count_ = 0;
    double sum_ = 0.0;
    double sum_sq_ = 0.0;
};

struct QueueTally {
    double occupancy_area = 0.0;   // sum over measured cycles of flits waiting
    std::uint64_t arrivals = 0;    // arrivals inside the measured window
    RunningStat waiting;           // waits of flits that arrived inside the window
    std::uint64_t size_at_midpoint = 0;
    std::uint64_t final_size = 0;
    bool unbounded_growth = false;

    friend bool operator==(const QueueTally&, const QueueTally&) = default;
};

struct ClassTally {
    NodeId source;
    NodeId destination;
    RunningStat latency;                // flits injected after warm-up
    std::vector<RunningStat> waiting;   // per hop, same filter
    RunningStat injection_gap;          // cycles between consecutive injections

    friend bool operator==(const ClassTally&, const ClassTally&) = default;
};

struct SimReport {
    std::uint64_t measured_cycles = 0;
    std::uint64_t injected = 0;
    std::uint64_t delivered = 0;
    std::uint64_t in_flight = 0;
    std::vector<ClassTally> classes;    // indexed by class id
    std::vector<std::vector<QueueId>> class_queues;
    std::vector<QueueTally> queues;     // indexed by queue id
    std::vector<RunningStat> service_gaps;  // per server, cycles between service starts

    double mean_latency(int class_id) const;
    double mean_waiting(QueueId queue, int class_id) const;
    std::vector<QueueId> unstable_queues() const;
    LatencyReport to_latency_report() const;

    friend bool operator==(const SimReport&, const SimReport&) = default;
};

// Cycle-accurate run. Requires deterministic integer service times.
SimReport simulate(const NocModel& model, const TrafficMatrix& matrix, const SimConfig& config);

// Empirical cv2 of one class's inter-injection gaps.
double measure_interarrival_cv(const SimReport& report, int class_id);

// |L - lambda W| / (lambda W) for one queue over the measured window.
double littles_law_check(const SimReport& report, QueueId queue);

}  // namespace nocprio
