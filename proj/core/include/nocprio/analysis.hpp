#pragma once

#include <vector>

#include "nocprio/network_model.hpp"
#include "nocprio/report.hpp"
#include "nocprio/traffic.hpp"

namespace nocprio {

struct HopTime {
    QueueId queue;
    ServerId server;
    double waiting;  // cycles spent queued before service starts
    double delta_t;  // part of waiting due to service extension by contenders
};

class ClassQueueingTimes {
public:
    explicit ClassQueueingTimes(std::vector<std::vector<HopTime>> per_class)
        : per_class_(std::move(per_class)) {}

    std::size_t class_count() const noexcept { return per_class_.size(); }
    const std::vector<HopTime>& hops(int class_id) const { return per_class_.at(static_cast<std::size_t>(class_id)); }
    const HopTime& at(QueueId queue, int class_id) const;
    double waiting(QueueId queue, int class_id) const { return at(queue, class_id).waiting; }
    double delta_t(QueueId queue, int class_id) const { return at(queue, class_id).delta_t; }

private:
    std::vector<std::vector<HopTime>> per_class_;
};

// Queueing time of every class at every queue on its route. Throws
// StabilityError naming the first saturated queue or server.
ClassQueueingTimes analyze(const NocModel& model, const std::vector<TrafficClass>& classes);
ClassQueueingTimes analyze(const NocModel& model, const TrafficMatrix& matrix);

LatencyReport end_to_end(const NocModel& model, const TrafficMatrix& matrix, const ClassQueueingTimes& times);
LatencyReport end_to_end(const NocModel& model, const std::vector<TrafficClass>& classes,
                         const ClassQueueingTimes& times);

// Largest scale of `shape` the analysis accepts as stable. Never exceeds
// lambda_max(); +infinity for an empty shape.
double stable_lambda_max(const NocModel& model, const TrafficMatrix& shape);

}  // namespace nocprio
