#include "nocprio/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>

#include "nocprio/errors.hpp"
#include "nocprio/flow_decomposition.hpp"
#include "nocprio/priority_queueing.hpp"
#include "nocprio/transforms.hpp"

namespace nocprio {

namespace {

constexpr double clamp_epsilon = 1e-12;

// All classes that wait in the same queue for the same server.
struct Group {
    QueueId queue;
    ServerId server;
    double rate = 0.0;
    double time = 0.0;
    double delta_t = 0.0;
};

struct Contender {
    int level;
    QueueId queue;
    double rate;
    double rho;
    double service_mean;
    double queueing_residual;  // of its thinned departure stream
    double time_residual;
};

double time_residual(double rate, const ServiceMoments& svc) {
    return 0.5 * rate * (svc.second_moment() - svc.mean());
}

// Ratio of a sub-flow to its parent, immune to rounding above 1.
double share(double part, double whole) { return std::min(1.0, part / whole); }

double slack(double used, const std::string& where) {
    if (used >= stability_limit)
        throw StabilityError(where, where + " is saturated (utilization " + std::to_string(used) + ")");
    return 1.0 - used;
}

class Engine {
public:
    Engine(const NocModel& model, const std::vector<TrafficClass>& classes)
        : model_(model), classes_(classes) {}

    ClassQueueingTimes run() {
        collect();
        check_utilization();
        propagate_cv2();
        for (QueueId q = 0; q < static_cast<QueueId>(model_.queues().size()); ++q)
            if (!queue_groups_[static_cast<std::size_t>(q)].empty())
                solve_queue(q);

        std::vector<std::vector<HopTime>> out(classes_.size());
        for (std::size_t c = 0; c < classes_.size(); ++c) {
            const auto& route = classes_[c].route;
            out[c].reserve(route.size());
            for (std::size_t k = 0; k < route.size(); ++k) {
                const auto& g = groups_[static_cast<std::size_t>(class_groups_[c][k])];
                out[c].push_back({g.queue, g.server, g.time, g.delta_t});
            }
        }
        return ClassQueueingTimes(std::move(out));
    }

private:
    const QueueSpec& queue(QueueId q) const { return model_.queue(q); }

    void collect() {
        const auto nq = model_.queues().size();
        const auto ns = model_.servers().size();
        queue_rate_.assign(nq, 0.0);
        queue_groups_.assign(nq, {});
        server_groups_.assign(ns, {});
        feeds_.assign(nq, {});
        external_.assign(nq, {});
        source_total_.assign(static_cast<std::size_t>(model_.node_count()), 0.0);

        std::unordered_map<long long, int> index;
        class_groups_.resize(classes_.size());
        for (std::size_t c = 0; c < classes_.size(); ++c) {
            const auto& cls = classes_[c];
            if (cls.route.empty())
                throw ConsistencyError("class " + std::to_string(cls.id) + " has no route");
            source_total_[static_cast<std::size_t>(cls.source)] += cls.rate;
            external_[static_cast<std::size_t>(cls.route.front().queue)][cls.source] += cls.rate;
            for (std::size_t k = 0; k < cls.route.size(); ++k) {
                const auto& hop = cls.route[k];
                const long long key = static_cast<long long>(hop.queue) * static_cast<long long>(ns) + hop.server;
                auto [it, fresh] = index.emplace(key, static_cast<int>(groups_.size()));
                if (fresh) {
                    groups_.push_back({hop.queue, hop.server});
                    queue_groups_[static_cast<std::size_t>(hop.queue)].push_back(it->second);
                    server_groups_[static_cast<std::size_t>(hop.server)].push_back(it->second);
                }
                groups_[static_cast<std::size_t>(it->second)].rate += cls.rate;
                queue_rate_[static_cast<std::size_t>(hop.queue)] += cls.rate;
                class_groups_[c].push_back(it->second);
                if (k + 1 < cls.route.size())
                    feeds_[static_cast<std::size_t>(cls.route[k + 1].queue)][hop.server] += cls.rate;
            }
        }

        server_rate_.assign(ns, 0.0);
        for (const auto& g : groups_)
            server_rate_[static_cast<std::size_t>(g.server)] += g.rate;

        // A queue fed by one server whose transfers all take at least its own
        // service time never sees a flit of its own still in service.
        tandem_.assign(nq, false);
        for (std::size_t q = 0; q < nq; ++q) {
            if (feeds_[q].size() != 1 || !external_[q].empty())
                continue;
            const auto& own = queue(static_cast<QueueId>(q)).service;
            if (!own.deterministic())
                continue;
            const auto feeder = feeds_[q].begin()->first;
            bool spaced = true;
            for (int g : server_groups_[static_cast<std::size_t>(feeder)]) {
                const auto& svc = queue(groups_[static_cast<std::size_t>(g)].queue).service;
                spaced = spaced && svc.deterministic() && svc.mean() >= own.mean();
            }
            tandem_[q] = spaced;
        }
    }

    void check_utilization() const {
        for (NodeId n = 0; n < model_.node_count(); ++n)
            if (source_total_[static_cast<std::size_t>(n)] >= 1.0)
                throw StabilityError("node " + std::to_string(n),
                                     "node " + std::to_string(n) + " injects a total rate >= 1");
        for (std::size_t q = 0; q < queue_rate_.size(); ++q)
            slack(queue_rate_[q] * queue(static_cast<QueueId>(q)).service.mean(), "queue " + queue(static_cast<QueueId>(q)).name);
        for (std::size_t s = 0; s < server_groups_.size(); ++s) {
            double rho = 0.0;
            for (int g : server_groups_[s])
                rho += group_rho(g);
            slack(rho, "server " + model_.server(static_cast<ServerId>(s)).name);
        }
    }

    double group_rho(int g) const {
        const auto& grp = groups_[static_cast<std::size_t>(g)];
        return grp.rate * queue(grp.queue).service.mean();
    }

    // cv2 of a group's share of its queue's arrival stream.
    double group_cv2(int g) const {
        const auto& grp = groups_[static_cast<std::size_t>(g)];
        const auto q = static_cast<std::size_t>(grp.queue);
        return split_flow(queue_cv2_[q], share(grp.rate, queue_rate_[q]));
    }

    // Arrival cv2 of every queue. Rings are cyclic, so iterate to a fixed point.
    void propagate_cv2() {
        const auto nq = model_.queues().size();
        const auto ns = model_.servers().size();
        queue_cv2_.assign(nq, 1.0);
        for (std::size_t q = 0; q < nq; ++q)
            if (queue_rate_[q] > 0.0)
                queue_cv2_[q] = 1.0 - queue_rate_[q];
        server_cv2_.assign(ns, 1.0);

        std::vector<ArrivalFlow> parts;
        for (int iter = 0; iter < 500; ++iter) {
            for (std::size_t s = 0; s < ns; ++s) {
                if (server_rate_[s] <= 0.0)
                    continue;
                parts.clear();
                double rho = 0.0, m1 = 0.0, m2 = 0.0;
                for (int g : server_groups_[s]) {
                    const auto& grp = groups_[static_cast<std::size_t>(g)];
                    const auto& svc = queue(grp.queue).service;
                    parts.emplace_back(grp.rate, group_cv2(g));
                    rho += group_rho(g);
                    m1 += grp.rate * svc.mean();
                    m2 += grp.rate * svc.second_moment();
                }
                m1 /= server_rate_[s];
                m2 /= server_rate_[s];
                const ServiceMoments mix(m1, std::max(m2, m1 * m1));
                server_cv2_[s] = departure_cv2(merge_flows(parts), mix, std::min(rho, stability_limit));
            }
            double change = 0.0;
            for (std::size_t q = 0; q < nq; ++q) {
                if (queue_rate_[q] <= 0.0)
                    continue;
                parts.clear();
                for (const auto& [node, rate] : external_[q]) {
                    const double total = source_total_[static_cast<std::size_t>(node)];
                    parts.emplace_back(rate, split_flow(1.0 - total, share(rate, total)));
                }
                for (const auto& [server, rate] : feeds_[q])
                    parts.emplace_back(rate, split_flow(server_cv2_[static_cast<std::size_t>(server)],
                                                        share(rate, server_rate_[static_cast<std::size_t>(server)])));
                const double next = merge_flows(parts).cv2();
                change = std::max(change, std::abs(next - queue_cv2_[q]));
                queue_cv2_[q] = next;
            }
            if (change < 1e-13)
                break;
        }
    }

    void solve_queue(QueueId q) {
        const auto& spec = queue(q);
        const auto& svc = spec.service;
        const auto& members = queue_groups_[static_cast<std::size_t>(q)];

        double modified_residual_sum = 0.0;
        double modified_load = 0.0;
        std::vector<Contender> higher;
        for (int gi : members) {
            auto& grp = groups_[static_cast<std::size_t>(gi)];
            const double rate = grp.rate;
            const double rho = rate * svc.mean();
            const double own_queueing = tandem_[static_cast<std::size_t>(q)]
                                            ? 0.0
                                            : queueing_residual(rate, group_cv2(gi), svc);
            const double own_time = time_residual(rate, svc);

            higher.clear();
            double lower_residual = 0.0;
            for (int gj : server_groups_[static_cast<std::size_t>(grp.server)]) {
                if (gj == gi)
                    continue;
                const auto& other = groups_[static_cast<std::size_t>(gj)];
                const auto& oq = queue(other.queue);
                if (oq.level < spec.level)
                    higher.push_back(contender(gj));
                else
                    lower_residual += time_residual(other.rate, oq.service);
            }
            std::sort(higher.begin(), higher.end(), [](const Contender& a, const Contender& b) {
                return a.level != b.level ? a.level < b.level : a.queue < b.queue;
            });

            double all_time = own_time + lower_residual;
            for (const auto& h : higher)
                all_time += h.time_residual;

            // Reference wait: the group alone behind its higher-priority contenders.
            double reference_residual = own_queueing + lower_residual;
            double reference_load = rho;
            double acc = 0.0;
            double cum = 0.0;
            for (const auto& h : higher) {
                cum += h.rho;
                const double w = (h.queueing_residual + (all_time - h.time_residual) + acc) /
                                 slack(cum, "server " + model_.server(grp.server).name);
                acc += h.rho + h.rho * w;
                reference_residual += h.time_residual + h.rho + h.rho * w;
                reference_load += h.rho;
            }
            const double reference = reference_residual / slack(reference_load, "server " + model_.server(grp.server).name);

            double p = 0.0;
            double busy = lower_residual;
            for (const auto& h : higher) {
                const double share = h.rho + h.rate * own_time;
                p += share;
                busy += share * h.service_mean;
            }
            const double extension = busy / slack(p, "queue " + spec.name + " (blocking probability)");

            const double rho_star = rate * (svc.mean() + extension);
            modified_residual_sum += (1.0 - rho_star) * std::max(0.0, reference - extension);
            modified_load += rho_star;
            grp.delta_t = extension;
        }
        const double base = modified_residual_sum / slack(modified_load, "queue " + spec.name);
        for (int gi : members) {
            auto& grp = groups_[static_cast<std::size_t>(gi)];
            const double t = base + grp.delta_t;
            grp.time = t < clamp_epsilon ? 0.0 : t;
        }
    }

    Contender contender(int g) const {
        const auto& grp = groups_[static_cast<std::size_t>(g)];
        const auto q = static_cast<std::size_t>(grp.queue);
        const auto& svc = queue(grp.queue).service;
        const double rho = grp.rate * svc.mean();
        double residual = 0.0;
        if (!tandem_[q]) {
            // Departures of the bystanders while this group is absent.
            const double bystanders = (queue_rate_[q] - grp.rate) * svc.mean() / (1.0 - rho);
            const ArrivalFlow arrivals(queue_rate_[q], queue_cv2_[q]);
            const double cd2 = departure_cv2(arrivals, svc, std::min(bystanders, stability_limit));
            residual = queueing_residual(grp.rate, split_flow(cd2, share(grp.rate, queue_rate_[q])), svc);
        }
        return {queue(grp.queue).level, grp.queue, grp.rate, rho, svc.mean(), residual,
                time_residual(grp.rate, svc)};
    }

    const NocModel& model_;
    const std::vector<TrafficClass>& classes_;

    std::vector<Group> groups_;
    std::vector<std::vector<int>> class_groups_;
    std::vector<std::vector<int>> queue_groups_;
    std::vector<std::vector<int>> server_groups_;
    std::vector<std::map<ServerId, double>> feeds_;
    std::vector<std::map<NodeId, double>> external_;
    std::vector<double> queue_rate_;
    std::vector<double> server_rate_;
    std::vector<double> source_total_;
    std::vector<double> queue_cv2_;
    std::vector<double> server_cv2_;
    std::vector<bool> tandem_;
};

}  // namespace

const HopTime& ClassQueueingTimes::at(QueueId queue, int class_id) const {
    for (const auto& h : hops(class_id))
        if (h.queue == queue)
            return h;
    throw ConsistencyError("class " + std::to_string(class_id) + " does not visit queue " + std::to_string(queue));
}

ClassQueueingTimes analyze(const NocModel& model, const std::vector<TrafficClass>& classes) {
    return Engine(model, classes).run();
}

ClassQueueingTimes analyze(const NocModel& model, const TrafficMatrix& matrix) {
    return analyze(model, instantiate_classes(model, matrix));
}

LatencyReport end_to_end(const NocModel& model, const std::vector<TrafficClass>& classes,
                         const ClassQueueingTimes& times) {
    if (times.class_count() != classes.size())
        throw ConsistencyError("queueing times cover " + std::to_string(times.class_count()) + " classes, expected " +
                               std::to_string(classes.size()));
    std::vector<LatencyRow> rows;
    rows.reserve(classes.size());
    for (const auto& c : classes) {
        const auto& hops = times.hops(c.id);
        if (hops.size() != c.route.size())
            throw ConsistencyError("queueing times do not cover the route of class " + std::to_string(c.id));
        double latency = 0.0;
        for (std::size_t k = 0; k < hops.size(); ++k) {
            if (hops[k].queue != c.route[k].queue || hops[k].server != c.route[k].server)
                throw ConsistencyError("queueing times do not match the route of class " + std::to_string(c.id));
            latency += hops[k].waiting + model.queue(hops[k].queue).service.mean() +
                       model.server(hops[k].server).transit_latency;
        }
        rows.push_back({c.source, c.destination, c.id, latency, std::nullopt, std::nullopt});
    }
    return LatencyReport(std::move(rows));
}

LatencyReport end_to_end(const NocModel& model, const TrafficMatrix& matrix, const ClassQueueingTimes& times) {
    return end_to_end(model, instantiate_classes(model, matrix), times);
}

double stable_lambda_max(const NocModel& model, const TrafficMatrix& shape) {
    const double hi_bound = lambda_max(model, shape);
    if (std::isinf(hi_bound))
        return hi_bound;
    auto stable = [&](double s) {
        try {
            analyze(model, shape.scaled(s));
            return true;
        } catch (const StabilityError&) {
            return false;
        } catch (const DomainError&) {
            return false;
        }
    };
    double lo = 0.0, hi = hi_bound;
    if (stable(hi))
        return hi;
    for (int i = 0; i < 60 && hi - lo > 1e-12 * hi_bound; ++i) {
        const double mid = 0.5 * (lo + hi);
        (stable(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace nocprio
