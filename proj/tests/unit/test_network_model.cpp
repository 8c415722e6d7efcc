#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nocprio/errors.hpp>
#include <nocprio/network_model.hpp>
#include <nocprio/traffic.hpp>

using namespace nocprio;

namespace {

int count_role(const NocModel& m, PortRole role) {
    int n = 0;
    for (const auto& q : m.queues())
        n += q.role == role;
    return n;
}

const auto T2 = deterministic_service(2);

int ring_distance(int n, int a, int b) {
    const int d = ((b - a) % n + n) % n;
    return std::min(d, n - d);
}

}  // namespace

TEST_CASE("ring structure") {
    const auto ring = build_ring(8, T2);
    CHECK(count_role(ring, PortRole::through) == 16);
    CHECK(count_role(ring, PortRole::injection) == 8);
    CHECK(instantiate_classes(ring, uniform_traffic(ring, 0.01)).size() == 56);

    const auto two = build_ring(2, T2);
    CHECK(two.route(0, 1).size() == 2);  // one link hop, then ejection
    CHECK(two.route(1, 0).size() == 2);

    const auto four = build_ring(4, T2);
    const auto& r = four.route(0, 2);
    REQUIRE(r.size() == 3);
    CHECK(four.server(r[0].server).name == "out_cw0");
    CHECK(four.queue(r[1].queue).name == "cw1");

    CHECK_THROWS_AS(build_ring(1, T2), DomainError);
}

TEST_CASE("ring routes shrink the distance at every hop") {
    for (int n = 2; n <= 10; ++n) {
        const auto ring = build_ring(n, T2);
        for (int s = 0; s < n; ++s) {
            for (int d = 0; d < n; ++d) {
                if (s == d)
                    continue;
                const auto& route = ring.route(s, d);
                CHECK(route.front().queue == *ring.injection_queue(s));
                CHECK(ring.server(route.back().server).kind == ServerKind::ejection);
                int prev = ring_distance(n, s, d) + 1;
                for (const auto& hop : route) {
                    const int here = ring_distance(n, ring.queue(hop.queue).router, d);
                    CHECK(here == prev - 1);
                    prev = here;
                }
                CHECK(prev == 0);
            }
        }
    }
}

TEST_CASE("mesh routes go vertical, switch, then horizontal") {
    const auto mesh = build_mesh(6, 6, T2);
    CHECK(mesh.node_count() == 36);
    CHECK(instantiate_classes(mesh, uniform_traffic(mesh, 0.001)).size() == 1260);

    const auto& same_row = mesh.route(0, 3);
    for (const auto& hop : same_row)
        CHECK(mesh.server(hop.server).kind != ServerKind::turn);
    CHECK(same_row.size() == 4);

    const auto& bend = mesh.route(0, 2 * 6 + 3);
    std::vector<std::string> names;
    for (const auto& hop : bend)
        names.push_back(mesh.queue(hop.queue).name + ">" + mesh.server(hop.server).name);
    CHECK(names == std::vector<std::string>{"inj_r0c0>out_down_r0c0", "down_r1c0>out_down_r1c0",
                                            "down_r2c0>turn_down_r2c0", "sw_r2c0>out_right_r2c0",
                                            "right_r2c1>out_right_r2c1", "right_r2c2>out_right_r2c2",
                                            "right_r2c3>eject_right_r2c3"});

    CHECK_THROWS_AS(build_mesh(1, 4, T2), DomainError);
    CHECK_THROWS_AS(build_mesh(4, 1, T2), DomainError);
}

TEST_CASE("mesh routes follow Y then X for every pair") {
    for (int w = 2; w <= 8; ++w) {
        for (int h = 2; h <= 8; h += 3) {
            const auto mesh = build_mesh(w, h, T2);
            for (int s = 0; s < w * h; ++s) {
                for (int d = 0; d < w * h; ++d) {
                    if (s == d)
                        continue;
                    bool horizontal = false;
                    int turns = 0;
                    int col = s % w;
                    for (const auto& hop : mesh.route(s, d)) {
                        const auto& q = mesh.queue(hop.queue);
                        const auto& name = q.name;
                        const bool h_queue = name.rfind("right", 0) == 0 || name.rfind("left", 0) == 0;
                        if (h_queue || q.role == PortRole::turn)
                            horizontal = true;
                        else if (q.role == PortRole::through)
                            CHECK_FALSE(horizontal);
                        if (!horizontal)
                            CHECK(q.router % w == col);
                        turns += mesh.server(hop.server).kind == ServerKind::turn;
                    }
                    const bool bends = s / w != d / w && s % w != d % w;
                    CHECK(turns == (bends ? 1 : 0));
                    const auto& last = mesh.queue(mesh.route(s, d).back().queue);
                    CHECK(last.router == d);
                }
            }
        }
    }
}

TEST_CASE("load is conserved between injection and ejection") {
    const auto mesh = build_mesh(4, 3, T2);
    TrafficMatrix m(mesh.node_count());
    for (int s = 0; s < mesh.node_count(); ++s)
        for (int d = 0; d < mesh.node_count(); ++d)
            if (s != d)
                m.set(s, d, 0.001 * (1 + (s * 7 + d * 3) % 5));
    std::map<QueueId, double> queue_load;
    std::map<NodeId, double> ejected;
    for (const auto& c : instantiate_classes(mesh, m)) {
        for (const auto& hop : c.route) {
            queue_load[hop.queue] += c.rate;
            const auto& srv = mesh.server(hop.server);
            if (srv.kind == ServerKind::ejection)
                ejected[mesh.queue(hop.queue).router] += c.rate;
        }
    }
    for (int n = 0; n < mesh.node_count(); ++n) {
        double inbound = 0;
        for (int s = 0; s < mesh.node_count(); ++s)
            inbound += m.rate(s, n);
        CHECK(queue_load[*mesh.injection_queue(n)] == doctest::Approx(m.source_total(n)));
        CHECK(ejected[n] == doctest::Approx(inbound));
    }
}

TEST_CASE("uniform ring traffic loads every through queue of a direction equally") {
    const auto ring = build_ring(8, T2);
    std::map<QueueId, double> load;
    for (const auto& c : instantiate_classes(ring, uniform_traffic(ring, 0.01)))
        for (const auto& hop : c.route)
            load[hop.queue] += c.rate;
    std::set<double> cw, ccw;
    for (const auto& q : ring.queues()) {
        if (q.name.rfind("cw", 0) == 0)
            cw.insert(std::round(load[q.id] * 1e12));
        if (q.name.rfind("ccw", 0) == 0)
            ccw.insert(std::round(load[q.id] * 1e12));
    }
    CHECK(cw.size() == 1);
    CHECK(ccw.size() == 1);
}

TEST_CASE("traffic matrix files") {
    const auto ring = build_ring(8, T2);
    std::istringstream ok("source,destination,rate\n3,5,0.01\n");
    const auto m = load_traffic_matrix(ok, ring);
    const auto cs = instantiate_classes(ring, m);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].source == 3);
    CHECK(cs[0].destination == 5);
    CHECK(cs[0].rate == 0.01);

    std::istringstream dup("source,destination,rate\n3,5,0.01\n3,5,0.02\n");
    CHECK_THROWS_AS(load_traffic_matrix(dup, ring), FormatError);
    std::istringstream unknown("source,destination,rate\n3,9,0.01\n");
    CHECK_THROWS_AS(load_traffic_matrix(unknown, ring), FormatError);
    std::istringstream header("src,dst,rate\n3,5,0.01\n");
    CHECK_THROWS_AS(load_traffic_matrix(header, ring), FormatError);
    std::istringstream heavy("source,destination,rate\n0,1,0.6\n0,2,0.5\n");
    CHECK_THROWS_AS(load_traffic_matrix(heavy, ring), DomainError);
    std::istringstream dotted("source,destination,rate\n1.2,3\n");
    CHECK_THROWS_AS(load_traffic_matrix(dotted, ring), FormatError);

    const auto mesh = build_mesh(6, 6, T2);
    std::istringstream rc("source,destination,rate\n1.3,8,0.02\n0.0,2.3,0.01\n");
    const auto mm = load_traffic_matrix(rc, mesh);
    CHECK(mm.rate(9, 8) == 0.02);
    CHECK(mm.rate(0, 15) == 0.01);
    CHECK(mm.entries().size() == 2);
}

TEST_CASE("empty traffic gives no classes") {
    const auto ring = build_ring(4, T2);
    CHECK(instantiate_classes(ring, TrafficMatrix(4)).empty());
    CHECK(std::isinf(lambda_max(ring, TrafficMatrix(4))));
}

TEST_CASE("per-source load must stay below one flit per cycle") {
    const auto ring = build_ring(8, T2);
    CHECK_THROWS_AS(uniform_traffic(ring, 0.15), DomainError);
    CHECK_NOTHROW(uniform_traffic(ring, 0.14));
}

TEST_CASE("lambda_max from utilization") {
    NocModel::Builder b(2);
    const auto q = b.add_queue("q", 0, PortRole::injection, T2, 0);
    const auto s = b.add_server("s", ServerKind::ejection, 0);
    b.set_injection(0, q).add_route(0, 1, {{q, s}});
    const auto single = std::move(b).build();
    TrafficMatrix one(2);
    one.set(0, 1, 1.0);
    CHECK(lambda_max(single, one) == doctest::Approx(0.5));

    const auto ring = build_ring(8, T2);
    const auto shape = uniform_pattern(ring);
    const double lm = lambda_max(ring, shape);
    CHECK(lm == doctest::Approx(0.05));
    auto worst = [&](double scale) {
        std::map<ServerId, double> load;
        for (const auto& c : instantiate_classes(ring, shape.scaled(scale)))
            for (const auto& hop : c.route)
                load[hop.server] += c.rate * 2;
        double w = 0;
        for (const auto& [_, v] : load)
            w = std::max(w, v);
        return w;
    };
    CHECK(worst(0.999 * lm) < 1.0);
    CHECK(worst(1.001 * lm) >= 1.0);
}
