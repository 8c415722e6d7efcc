#include "nocprio/network_model.hpp"

#include <algorithm>
#include <charconv>
#include <string>

#include "nocprio/errors.hpp"

namespace nocprio {

namespace {

int parse_int(std::string_view s) {
    int v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || s.empty())
        throw FormatError("invalid node id '" + std::string(s) + "'");
    return v;
}

// Steps and direction (+1 clockwise, -1 counter-clockwise) from a to b on a ring.
std::pair<int, int> ring_path(int n, int a, int b) {
    const int cw = ((b - a) % n + n) % n;
    const int ccw = ((a - b) % n + n) % n;
    return cw <= ccw ? std::pair{cw, +1} : std::pair{ccw, -1};
}

}  // namespace

std::optional<QueueId> NocModel::injection_queue(NodeId node) const {
    if (node < 0 || node >= node_count())
        return std::nullopt;
    return injection_[static_cast<std::size_t>(node)];
}

bool NocModel::has_route(NodeId src, NodeId dst) const {
    if (src < 0 || dst < 0 || src >= node_count() || dst >= node_count())
        return false;
    return !routes_[static_cast<std::size_t>(src * node_count() + dst)].empty();
}

const Route& NocModel::route(NodeId src, NodeId dst) const {
    if (!has_route(src, dst))
        throw ConsistencyError("no route from node " + std::to_string(src) + " to node " +
                               std::to_string(dst));
    return routes_[static_cast<std::size_t>(src * node_count() + dst)];
}

NodeId NocModel::parse_node(std::string_view text) const {
    NodeId id = 0;
    const auto dot = text.find('.');
    if (dot != std::string_view::npos) {
        if (topology_.kind != TopologyKind::mesh)
            throw FormatError("row.col node ids are only valid on a mesh: '" + std::string(text) + "'");
        const int row = parse_int(text.substr(0, dot));
        const int col = parse_int(text.substr(dot + 1));
        if (row < 0 || col < 0 || row >= topology_.height || col >= topology_.width)
            throw FormatError("unknown node '" + std::string(text) + "'");
        id = row * topology_.width + col;
    } else {
        id = parse_int(text);
    }
    if (id < 0 || id >= node_count())
        throw FormatError("unknown node id " + std::string(text));
    return id;
}

NocModel::Builder::Builder(int nodes) {
    if (nodes < 1)
        throw DomainError("a model needs at least one node");
    model_.topology_.nodes = nodes;
    model_.injection_.assign(static_cast<std::size_t>(nodes), std::nullopt);
    model_.routes_.assign(static_cast<std::size_t>(nodes) * static_cast<std::size_t>(nodes), Route{});
}

NocModel::Builder& NocModel::Builder::topology(Topology t) {
    t.nodes = model_.topology_.nodes;
    model_.topology_ = t;
    return *this;
}

QueueId NocModel::Builder::add_queue(std::string name, NodeId router, PortRole role,
                                     ServiceMoments service, int level) {
    if (level < 0)
        throw DomainError("queue priority level must be >= 0");
    const auto id = static_cast<QueueId>(model_.queues_.size());
    model_.queues_.push_back({id, std::move(name), router, role, service, level});
    return id;
}

ServerId NocModel::Builder::add_server(std::string name, ServerKind kind, int transit_latency) {
    if (transit_latency < 0)
        throw DomainError("transit latency must be >= 0");
    const auto id = static_cast<ServerId>(model_.servers_.size());
    model_.servers_.push_back({id, std::move(name), kind, transit_latency, {}});
    return id;
}

NocModel::Builder& NocModel::Builder::set_injection(NodeId node, QueueId queue) {
    if (node < 0 || node >= model_.node_count())
        throw DomainError("node " + std::to_string(node) + " out of range");
    model_.queue(queue);
    model_.injection_[static_cast<std::size_t>(node)] = queue;
    return *this;
}

NocModel::Builder& NocModel::Builder::add_route(NodeId src, NodeId dst, Route route) {
    const int n = model_.node_count();
    if (src < 0 || dst < 0 || src >= n || dst >= n || src == dst)
        throw DomainError("invalid route endpoints " + std::to_string(src) + " -> " + std::to_string(dst));
    if (route.empty())
        throw DomainError("route must contain at least one hop");
    const auto inj = model_.injection_[static_cast<std::size_t>(src)];
    if (!inj || route.front().queue != *inj)
        throw DomainError("route from node " + std::to_string(src) + " must start at its injection queue");
    std::vector<QueueId> seen;
    for (const auto& hop : route) {
        model_.queue(hop.queue);
        model_.server(hop.server);
        if (std::find(seen.begin(), seen.end(), hop.queue) != seen.end())
            throw DomainError("route revisits queue " + model_.queue(hop.queue).name);
        seen.push_back(hop.queue);
    }
    model_.routes_[static_cast<std::size_t>(src * n + dst)] = std::move(route);
    return *this;
}

NocModel NocModel::Builder::build() && {
    for (const auto& r : model_.routes_) {
        for (const auto& hop : r) {
            auto& c = model_.servers_[static_cast<std::size_t>(hop.server)].contenders;
            if (std::find(c.begin(), c.end(), hop.queue) == c.end())
                c.push_back(hop.queue);
        }
    }
    for (auto& s : model_.servers_) {
        std::sort(s.contenders.begin(), s.contenders.end(), [this](QueueId a, QueueId b) {
            const int la = model_.queue(a).level;
            const int lb = model_.queue(b).level;
            return la != lb ? la < lb : a < b;
        });
    }
    return std::move(model_);
}

NocModel build_ring(int nodes, ServiceMoments service, int link_latency) {
    if (nodes < 2)
        throw DomainError("ring needs at least 2 nodes, got " + std::to_string(nodes));
    NocModel::Builder b(nodes);
    b.topology({TopologyKind::ring, nodes, 0, 0, link_latency, link_latency});

    struct Router {
        QueueId cw, ccw, inj;
        ServerId out_cw, out_ccw, eject_cw, eject_ccw;
    };
    std::vector<Router> r(static_cast<std::size_t>(nodes));
    for (int k = 0; k < nodes; ++k) {
        const auto s = std::to_string(k);
        auto& x = r[static_cast<std::size_t>(k)];
        x.cw = b.add_queue("cw" + s, k, PortRole::through, service, 0);
        x.ccw = b.add_queue("ccw" + s, k, PortRole::through, service, 0);
        x.inj = b.add_queue("inj" + s, k, PortRole::injection, service, 1);
        x.out_cw = b.add_server("out_cw" + s, ServerKind::link, link_latency);
        x.out_ccw = b.add_server("out_ccw" + s, ServerKind::link, link_latency);
        x.eject_cw = b.add_server("eject_cw" + s, ServerKind::ejection, 0);
        x.eject_ccw = b.add_server("eject_ccw" + s, ServerKind::ejection, 0);
        b.set_injection(k, x.inj);
    }
    for (int src = 0; src < nodes; ++src) {
        for (int dst = 0; dst < nodes; ++dst) {
            if (src == dst)
                continue;
            const auto [steps, dir] = ring_path(nodes, src, dst);
            Route route;
            int at = src;
            QueueId q = r[static_cast<std::size_t>(src)].inj;
            for (int i = 0; i < steps; ++i) {
                const auto& x = r[static_cast<std::size_t>(at)];
                route.push_back({q, dir > 0 ? x.out_cw : x.out_ccw});
                at = (at + dir + nodes) % nodes;
                q = dir > 0 ? r[static_cast<std::size_t>(at)].cw : r[static_cast<std::size_t>(at)].ccw;
            }
            const auto& last = r[static_cast<std::size_t>(at)];
            route.push_back({q, dir > 0 ? last.eject_cw : last.eject_ccw});
            b.add_route(src, dst, std::move(route));
        }
    }
    return std::move(b).build();
}

NocModel build_mesh(int width, int height, ServiceMoments service, int link_latency, int switch_latency) {
    if (width < 2 || height < 2)
        throw DomainError("mesh dimensions must be at least 2x2, got " + std::to_string(width) + "x" +
                          std::to_string(height));
    if (switch_latency < 0)
        throw DomainError("switch latency must be >= 0");
    const int nodes = width * height;
    NocModel::Builder b(nodes);
    b.topology({TopologyKind::mesh, nodes, width, height, link_latency, switch_latency});

    // Directions: 0 down, 1 up, 2 right, 3 left.
    static constexpr const char* dir_name[4] = {"down", "up", "right", "left"};
    struct Router {
        QueueId in[4];
        QueueId sw, inj;
        ServerId out[4];
        ServerId eject[4];
        ServerId turn[2];   // from the vertical queues
    };
    std::vector<Router> r(static_cast<std::size_t>(nodes));
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const int id = row * width + col;
            const auto tag = "_r" + std::to_string(row) + "c" + std::to_string(col);
            auto& x = r[static_cast<std::size_t>(id)];
            for (int d = 0; d < 4; ++d) {
                x.in[d] = b.add_queue(dir_name[d] + tag, id, PortRole::through, service, 0);
                x.out[d] = b.add_server(std::string("out_") + dir_name[d] + tag, ServerKind::link, link_latency);
                x.eject[d] = b.add_server(std::string("eject_") + dir_name[d] + tag, ServerKind::ejection, 0);
            }
            x.sw = b.add_queue("sw" + tag, id, PortRole::turn, service, 1);
            x.inj = b.add_queue("inj" + tag, id, PortRole::injection, service, 2);
            x.turn[0] = b.add_server("turn_down" + tag, ServerKind::turn, switch_latency);
            x.turn[1] = b.add_server("turn_up" + tag, ServerKind::turn, switch_latency);
            b.set_injection(id, x.inj);
        }
    }
    auto at = [&](int row, int col) -> Router& { return r[static_cast<std::size_t>(row * width + col)]; };

    for (int src = 0; src < nodes; ++src) {
        for (int dst = 0; dst < nodes; ++dst) {
            if (src == dst)
                continue;
            const int r0 = src / width, c0 = src % width;
            const int r1 = dst / width, c1 = dst % width;
            Route route;
            QueueId q = at(r0, c0).inj;
            int last_dir = 0;  // direction of the through queue held at the end
            int row = r0, col = c0;
            if (r0 != r1) {
                const auto [steps, sign] = ring_path(height, r0, r1);
                const int d = sign > 0 ? 0 : 1;
                for (int i = 0; i < steps; ++i) {
                    route.push_back({q, at(row, col).out[d]});
                    row = (row + sign + height) % height;
                    q = at(row, col).in[d];
                }
                last_dir = d;
                if (c0 != c1) {
                    route.push_back({q, at(row, col).turn[d]});
                    q = at(row, col).sw;
                }
            }
            if (c0 != c1) {
                const auto [steps, sign] = ring_path(width, c0, c1);
                const int d = sign > 0 ? 2 : 3;
                for (int i = 0; i < steps; ++i) {
                    route.push_back({q, at(row, col).out[d]});
                    col = (col + sign + width) % width;
                    q = at(row, col).in[d];
                }
                last_dir = d;
            }
            route.push_back({q, at(row, col).eject[last_dir]});
            b.add_route(src, dst, std::move(route));
        }
    }
    return std::move(b).build();
}

}  // namespace nocprio
