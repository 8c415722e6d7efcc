#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "nocprio/network_model.hpp"

namespace nocprio {

// Per (source, destination) injection rates in flits/cycle.
class TrafficMatrix {
public:
    using Pair = std::pair<NodeId, NodeId>;

    explicit TrafficMatrix(int nodes = 0) : nodes_(nodes) {}

    int node_count() const noexcept { return nodes_; }
    void set(NodeId src, NodeId dst, double rate);
    double rate(NodeId src, NodeId dst) const;
    double source_total(NodeId src) const;
    const std::map<Pair, double>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

    TrafficMatrix scaled(double factor) const;

private:
    int nodes_;
    std::map<Pair, double> entries_;
};

TrafficMatrix uniform_traffic(const NocModel& model, double rate_per_pair);

// Unit rate on every routable pair. Only meaningful as a shape to be scaled.
TrafficMatrix uniform_pattern(const NocModel& model);

// CSV with header `source,destination,rate`.
TrafficMatrix load_traffic_matrix(std::istream& in, const NocModel& model);
TrafficMatrix load_traffic_matrix(const std::filesystem::path& path, const NocModel& model);

struct TrafficClass {
    int id;
    NodeId source;
    NodeId destination;
    double rate;
    Route route;
};

// One class per nonzero matrix entry, in (source, destination) order.
std::vector<TrafficClass> instantiate_classes(const NocModel& model, const TrafficMatrix& matrix);

// Largest scale keeping every queue port and server below full utilization;
// +infinity when the matrix carries no traffic.
double lambda_max(const NocModel& model, const TrafficMatrix& shape);

}  // namespace nocprio
