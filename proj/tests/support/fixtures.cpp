#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <sstream>

#include <nocprio/errors.hpp>
#include <nocprio/rng.hpp>

namespace fixtures {

namespace {

ClassFlow flow(double rate) { return {ArrivalFlow(rate, 1.0 - rate), deterministic_service(2)}; }

std::string fmt(const char* what, double a, double b) {
    std::ostringstream os;
    os << what << " (" << a << " vs " << b << ")";
    return os.str();
}

}  // namespace

SplitNetwork split_high_network() {
    NocModel::Builder b(4);
    const auto svc = deterministic_service(2);
    const QueueId high = b.add_queue("high", 0, PortRole::injection, svc, 0);
    const QueueId low = b.add_queue("low", 1, PortRole::injection, svc, 1);
    const ServerId shared = b.add_server("shared", ServerKind::link, 0);
    const ServerId own = b.add_server("private", ServerKind::link, 0);
    b.set_injection(0, high).set_injection(1, low);
    b.add_route(0, 2, {{high, shared}});
    b.add_route(0, 3, {{high, own}});
    b.add_route(1, 2, {{low, shared}});
    return {std::move(b).build(), high, low};
}

TrafficMatrix split_high_traffic(double shared, double diverted, double injected) {
    TrafficMatrix m(4);
    m.set(0, 2, shared);
    m.set(0, 3, diverted);
    m.set(1, 2, injected);
    return m;
}

SplitNetwork split_low_network() {
    NocModel::Builder b(4);
    const auto svc = deterministic_service(2);
    const QueueId high = b.add_queue("high", 0, PortRole::injection, svc, 0);
    const QueueId low = b.add_queue("low", 1, PortRole::injection, svc, 1);
    const ServerId shared = b.add_server("shared", ServerKind::link, 0);
    const ServerId own = b.add_server("private", ServerKind::link, 0);
    b.set_injection(0, high).set_injection(1, low);
    b.add_route(0, 2, {{high, shared}});
    b.add_route(1, 3, {{low, own}});
    b.add_route(1, 2, {{low, shared}});
    return {std::move(b).build(), high, low};
}

TrafficMatrix split_low_traffic(double high, double diverted, double contender) {
    TrafficMatrix m(4);
    m.set(0, 2, high);
    m.set(1, 3, diverted);
    m.set(1, 2, contender);
    return m;
}

NocModel priority_chain(int classes) {
    NocModel::Builder b(classes + 1);
    const ServerId out = b.add_server("out", ServerKind::link, 0);
    std::vector<QueueId> qs;
    for (int k = 0; k < classes; ++k) {
        qs.push_back(b.add_queue("q" + std::to_string(k), k, PortRole::injection, deterministic_service(2), k));
        b.set_injection(k, qs.back());
    }
    for (int k = 0; k < classes; ++k)
        b.add_route(k, classes, {{qs[static_cast<std::size_t>(k)], out}});
    return std::move(b).build();
}

TrafficMatrix chain_traffic(const std::vector<double>& rates) {
    TrafficMatrix m(static_cast<int>(rates.size()) + 1);
    for (std::size_t k = 0; k < rates.size(); ++k)
        m.set(static_cast<int>(k), static_cast<int>(rates.size()), rates[k]);
    return m;
}

PriorityQueueSystem priority_system(const std::vector<double>& rates, int service) {
    std::vector<PriorityClassParams> cs;
    for (std::size_t k = 0; k < rates.size(); ++k)
        cs.push_back({static_cast<int>(k), ArrivalFlow(rates[k], 1.0 - rates[k]), deterministic_service(service),
                      static_cast<int>(k) + 1});
    return PriorityQueueSystem(std::move(cs));
}

int class_of(const std::vector<TrafficClass>& classes, NodeId src, NodeId dst) {
    for (const auto& c : classes)
        if (c.source == src && c.destination == dst)
            return c.id;
    throw ConsistencyError("no class for the requested pair");
}

CheckResult check_priority_ordering(int samples, std::uint64_t seed) {
    RngStream rng(seed, 1);
    for (int i = 0; i < samples; ++i) {
        const int n = 2 + static_cast<int>(rng.next() % 4);
        const int t = 1 + static_cast<int>(rng.next() % 4);
        const double total = 0.97 * rng.uniform();
        const double rate = total / (n * t);
        if (rate <= 0.0) {
            --i;
            continue;
        }
        const auto w = waiting_times_basic(priority_system(std::vector<double>(static_cast<std::size_t>(n), rate), t));
        for (std::size_t k = 1; k < w.size(); ++k)
            if (w[k] < w[k - 1])
                return {false, i + 1, fmt("rank order violated", w[k - 1], w[k])};
    }
    return {true, samples, "waits nondecreasing in rank"};
}

CheckResult check_priority_monotonicity(int samples, std::uint64_t seed) {
    RngStream rng(seed, 2);
    for (int i = 0; i < samples; ++i) {
        const int n = 1 + static_cast<int>(rng.next() % 4);
        std::vector<double> rates(static_cast<std::size_t>(n));
        double budget = 0.95 * rng.uniform();
        for (auto& r : rates)
            r = std::max(1e-4, budget * rng.uniform() / (2.0 * n));
        const auto base = waiting_times_basic(priority_system(rates));
        const auto k = static_cast<std::size_t>(rng.next() % static_cast<std::uint64_t>(n));
        auto bumped = rates;
        bumped[k] += 1e-3;
        std::vector<double> after;
        try {
            after = waiting_times_basic(priority_system(bumped));
        } catch (const StabilityError&) {
            --i;
            continue;
        }
        for (std::size_t j = k; j < base.size(); ++j)
            if (after[j] < base[j] - 1e-12)
                return {false, i + 1, fmt("wait decreased with more higher-priority load", base[j], after[j])};
    }
    return {true, samples, "every W_i nondecreasing in lambda_k, k <= i"};
}

CheckResult check_service_rate_monotonicity(int samples, std::uint64_t seed) {
    RngStream rng(seed, 3);
    int done = 0;
    while (done < samples) {
        const double high = 0.3 * rng.uniform() + 1e-4;
        const double diverted = 0.2 * rng.uniform();
        const double contender = 0.2 * rng.uniform() + 1e-4;
        try {
            const auto a = service_rate_transform({flow(high), flow(diverted), flow(contender)});
            const auto b = service_rate_transform({flow(high + 1e-3), flow(diverted), flow(contender)});
            if (a.service_extension < 0.0 || a.modified_service.mean() < 2.0 ||
                a.modified_utilization < 2.0 * contender)
                return {false, done + 1, fmt("transformed service shrank", a.modified_service.mean(), 2.0)};
            if (!(b.service_extension > a.service_extension && b.modified_service.mean() > a.modified_service.mean() &&
                  b.modified_utilization > a.modified_utilization))
                return {false, done + 1, fmt("extension not increasing in high rate", a.service_extension,
                                              b.service_extension)};
        } catch (const StabilityError&) {
            continue;
        }
        ++done;
    }
    return {true, samples, "extension >= 0, T* >= T, rho* >= rho, all increasing in high rate"};
}

CheckResult check_structural_ordering(int samples, std::uint64_t seed) {
    RngStream rng(seed, 4);
    int done = 0;
    while (done < samples) {
        const double shared = 0.25 * rng.uniform() + 1e-4;
        const double diverted = 0.25 * rng.uniform();
        const double injected = 0.25 * rng.uniform() + 1e-4;
        try {
            const auto st = structural_transform({flow(shared), flow(diverted), flow(injected)});
            const double alone = residual_geo_g1(flow(injected).flow, deterministic_service(2)) / (1.0 - 2.0 * injected);
            const auto chain = waiting_times_basic(priority_system({shared, diverted, injected}));
            if (st.injected_wait < alone - 1e-12)
                return {false, done + 1, fmt("below the priority-free queue", st.injected_wait, alone)};
            if (st.injected_wait > chain[2] + 1e-12)
                return {false, done + 1, fmt("above the naive strict chain", st.injected_wait, chain[2])};
        } catch (const StabilityError&) {
            continue;
        }
        ++done;
    }
    return {true, samples, "priority-free wait <= injected wait <= naive chain"};
}

CheckResult check_engine_monotonicity(int samples, std::uint64_t seed) {
    RngStream rng(seed, 5);
    for (int i = 0; i < samples; ++i) {
        const bool mesh = rng.uniform() < 0.3;
        const int a_dim = static_cast<int>(rng.next() % (mesh ? 3 : 8));
        const int b_dim = mesh ? 2 + static_cast<int>(rng.next() % 3) : 0;
        const auto model = mesh ? build_mesh(2 + a_dim, b_dim, deterministic_service(2))
                                : build_ring(3 + a_dim, deterministic_service(2));
        TrafficMatrix shape(model.node_count());
        for (NodeId s = 0; s < model.node_count(); ++s)
            for (NodeId d = 0; d < model.node_count(); ++d)
                if (s != d && rng.uniform() < 0.7)
                    shape.set(s, d, 0.05 + rng.uniform());
        if (shape.empty()) {
            --i;
            continue;
        }
        const double limit = stable_lambda_max(model, shape);
        double a = rng.uniform(), b = rng.uniform();
        if (a > b)
            std::swap(a, b);
        const auto lo = shape.scaled(0.98 * a * limit);
        const auto hi = shape.scaled(0.98 * b * limit);
        const auto ra = end_to_end(model, lo, analyze(model, lo));
        const auto rb = end_to_end(model, hi, analyze(model, hi));
        for (std::size_t k = 0; k < ra.rows().size(); ++k) {
            const double x = *ra.rows()[k].analytical;
            const double y = *rb.rows()[k].analytical;
            if (y < x * (1.0 - 1e-12))
                return {false, i + 1, fmt("latency fell as load grew", x, y)};
        }
    }
    return {true, samples, "per-pair latency nondecreasing in traffic scale"};
}

CheckResult check_trace(const NocModel& model, const TrafficMatrix& matrix, const std::string& trace) {
    struct Event {
        std::uint64_t cycle;
        std::string kind;
        QueueId queue;
        int cls;
        std::uint64_t flit;
    };
    std::vector<Event> events;
    std::istringstream in(trace);
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        Event e;
        std::string cell;
        std::getline(ls, cell, ',');
        e.cycle = std::stoull(cell);
        std::getline(ls, e.kind, ',');
        std::getline(ls, cell, ',');
        e.queue = std::stoi(cell);
        std::getline(ls, cell, ',');
        e.cls = std::stoi(cell);
        std::getline(ls, cell, ',');
        e.flit = std::stoull(cell);
        events.push_back(std::move(e));
    }
    if (events.empty())
        return {false, 0, "empty trace"};

    const auto classes = instantiate_classes(model, matrix);
    std::vector<std::deque<std::uint64_t>> queues(model.queues().size());
    std::vector<std::uint64_t> port_free(model.queues().size(), 0), server_free(model.servers().size(), 0);
    std::map<std::uint64_t, std::pair<int, std::size_t>> flits;  // id -> (class, hop)
    std::map<int, std::uint64_t> last_delivered;

    auto wants = [&](QueueId q) -> ServerId {
        const auto& [cls, hop] = flits.at(queues[static_cast<std::size_t>(q)].front());
        return classes[static_cast<std::size_t>(cls)].route[hop].server;
    };
    auto eligible = [&](QueueId q, ServerId s, std::uint64_t t) {
        const auto qi = static_cast<std::size_t>(q);
        return !queues[qi].empty() && port_free[qi] <= t && wants(q) == s;
    };

    int grants = 0, contested = 0;
    std::size_t i = 0;
    const auto end = events.back().cycle;
    for (std::uint64_t t = 0; t <= end; ++t) {
        std::vector<std::pair<QueueId, std::uint64_t>> granted;
        for (; i < events.size() && events[i].cycle == t; ++i) {
            const auto& e = events[i];
            const auto qi = static_cast<std::size_t>(e.queue);
            if (e.kind == "inject") {
                flits[e.flit] = {e.cls, 0};
                queues[qi].push_back(e.flit);
            } else if (e.kind == "arrive") {
                queues[qi].push_back(e.flit);
            } else if (e.kind == "grant") {
                granted.emplace_back(e.queue, e.flit);
            } else if (e.kind == "deliver") {
                auto [it, fresh] = last_delivered.emplace(e.cls, e.flit);
                if (!fresh && it->second > e.flit)
                    return {false, grants, "class delivered out of injection order at cycle " + std::to_string(t)};
                it->second = e.flit;
                flits.erase(e.flit);
            }
        }
        std::vector<bool> busy_now(model.servers().size(), false);
        for (const auto& [q, id] : granted) {
            const auto qi = static_cast<std::size_t>(q);
            if (queues[qi].empty() || queues[qi].front() != id)
                return {false, grants, "grant is not the queue head at cycle " + std::to_string(t)};
            const ServerId s = wants(q);
            const auto si = static_cast<std::size_t>(s);
            if (port_free[qi] > t || server_free[si] > t || busy_now[si])
                return {false, grants, "grant on a busy port or server at cycle " + std::to_string(t)};
            bool others = false;
            for (QueueId other : model.server(s).contenders) {
                if (other == q || !eligible(other, s, t))
                    continue;
                others = true;
                if (model.queue(other).level < model.queue(q).level)
                    return {false, grants, "lower priority served first at cycle " + std::to_string(t) + " (" +
                                               model.queue(q).name + " over " + model.queue(other).name + ")"};
            }
            contested += others;
            busy_now[si] = true;
            ++grants;
        }
        for (const auto& [q, id] : granted) {
            const auto qi = static_cast<std::size_t>(q);
            const ServerId s = wants(q);
            const auto service = static_cast<std::uint64_t>(model.queue(q).service.mean());
            port_free[qi] = server_free[static_cast<std::size_t>(s)] = t + service;
            queues[qi].pop_front();
            ++flits[id].second;
        }
        for (const auto& s : model.servers()) {
            if (server_free[static_cast<std::size_t>(s.id)] > t)
                continue;
            for (QueueId q : s.contenders)
                if (eligible(q, s.id, t))
                    return {false, grants, "server " + s.name + " idle with a waiting head flit at cycle " +
                                               std::to_string(t)};
        }
    }
    if (contested == 0)
        return {false, grants, "trace never exercised contention"};
    return {true, grants, std::to_string(grants) + " grants, " + std::to_string(contested) + " contested"};
}

}  // namespace fixtures
