#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nocprio/moments.hpp"

namespace nocprio {

using NodeId = int;
using QueueId = int;
using ServerId = int;

enum class PortRole { injection, through, turn };

// link: router output onto a ring link; ejection: delivery to the local node;
// turn: hand-over from a vertical ring to the horizontal switch queue.
enum class ServerKind { link, ejection, turn };

struct QueueSpec {
    QueueId id;
    std::string name;
    NodeId router;
    PortRole role;
    ServiceMoments service;
    int level;  // 0 is the highest priority
};

struct ServerSpec {
    ServerId id;
    std::string name;
    ServerKind kind;
    int transit_latency;            // cycles between service end and arrival downstream
    std::vector<QueueId> contenders;  // sorted by (level, id)
};

struct Hop {
    QueueId queue;
    ServerId server;
    friend bool operator==(const Hop&, const Hop&) = default;
};

using Route = std::vector<Hop>;

enum class TopologyKind { ring, mesh, custom };

struct Topology {
    TopologyKind kind = TopologyKind::custom;
    int nodes = 0;
    int width = 0;   // mesh only
    int height = 0;  // mesh only
    int link_latency = 1;
    int switch_latency = 1;
};

// Queues, arbitration points and fixed routes of a priority-arbitrated NoC.
// Immutable once built.
class NocModel {
public:
    class Builder;

    const Topology& topology() const noexcept { return topology_; }
    int node_count() const noexcept { return topology_.nodes; }

    const std::vector<QueueSpec>& queues() const noexcept { return queues_; }
    const QueueSpec& queue(QueueId id) const { return queues_.at(static_cast<std::size_t>(id)); }
    const std::vector<ServerSpec>& servers() const noexcept { return servers_; }
    const ServerSpec& server(ServerId id) const { return servers_.at(static_cast<std::size_t>(id)); }

    std::optional<QueueId> injection_queue(NodeId node) const;
    bool has_route(NodeId src, NodeId dst) const;
    const Route& route(NodeId src, NodeId dst) const;

    // Integer id, or "row.col" on a mesh.
    NodeId parse_node(std::string_view text) const;

private:
    NocModel() = default;

    Topology topology_;
    std::vector<QueueSpec> queues_;
    std::vector<ServerSpec> servers_;
    std::vector<std::optional<QueueId>> injection_;
    std::vector<Route> routes_;  // src * nodes + dst; empty when unroutable
};

class NocModel::Builder {
public:
    explicit Builder(int nodes);

    Builder& topology(Topology t);
    QueueId add_queue(std::string name, NodeId router, PortRole role, ServiceMoments service, int level);
    ServerId add_server(std::string name, ServerKind kind, int transit_latency);
    Builder& set_injection(NodeId node, QueueId queue);
    Builder& add_route(NodeId src, NodeId dst, Route route);

    NocModel build() &&;

private:
    NocModel model_;
};

// Bidirectional ring; shortest direction, clockwise on ties.
NocModel build_ring(int nodes, ServiceMoments service, int link_latency = 1);

// Rows and columns are bidirectional rings; Y-X routing with one switch queue
// per router between the vertical and horizontal rings.
NocModel build_mesh(int width, int height, ServiceMoments service, int link_latency = 1,
                    int switch_latency = 1);

}  // namespace nocprio
