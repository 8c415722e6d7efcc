#include "nocprio/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>
#include <string>

#include "nocprio/errors.hpp"
#include "nocprio/rng.hpp"

namespace nocprio {

double RunningStat::variance() const noexcept {
    if (count_ < 2)
        return 0.0;
    const double m = mean();
    return std::max(0.0, sum_sq_ / static_cast<double>(count_) - m * m);
}

double RunningStat::cv2() const noexcept {
    const double m = mean();
    return m == 0.0 ? 0.0 : variance() / (m * m);
}

double SimReport::mean_latency(int class_id) const {
    return classes.at(static_cast<std::size_t>(class_id)).latency.mean();
}

double SimReport::mean_waiting(QueueId queue, int class_id) const {
    const auto& qs = class_queues.at(static_cast<std::size_t>(class_id));
    for (std::size_t k = 0; k < qs.size(); ++k)
        if (qs[k] == queue)
            return classes[static_cast<std::size_t>(class_id)].waiting[k].mean();
    throw ConsistencyError("class " + std::to_string(class_id) + " does not visit queue " + std::to_string(queue));
}

std::vector<QueueId> SimReport::unstable_queues() const {
    std::vector<QueueId> out;
    for (std::size_t q = 0; q < queues.size(); ++q)
        if (queues[q].unbounded_growth)
            out.push_back(static_cast<QueueId>(q));
    return out;
}

LatencyReport SimReport::to_latency_report() const {
    std::vector<LatencyRow> rows;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        const auto& t = classes[c];
        if (t.latency.count() == 0)
            continue;
        rows.push_back({t.source, t.destination, static_cast<int>(c), std::nullopt, t.latency.mean(), std::nullopt});
    }
    return LatencyReport(std::move(rows));
}

namespace {

struct Flit {
    std::uint64_t id;
    std::uint64_t injected;
    std::uint64_t arrived;
    int cls;
    int hop;
};

struct Pending {
    std::uint32_t flit;
    bool deliver;
};

struct Source {
    NodeId node;
    std::vector<int> classes;
    std::vector<double> cumulative;
    RngStream rng;
    int period = 0;
    std::size_t next_class = 0;
};

class Simulation {
public:
    Simulation(const NocModel& model, const TrafficMatrix& matrix, const SimConfig& cfg)
        : model_(model), cfg_(cfg), classes_(instantiate_classes(model, matrix)) {
        if (cfg.warmup_cycles >= cfg.total_cycles)
            throw DomainError("warm-up must be shorter than the run");
        for (const auto& q : model.queues()) {
            const auto& s = q.service;
            if (!s.deterministic() || s.mean() != std::floor(s.mean()))
                throw DomainError("simulator needs deterministic integer service, queue " + q.name + " has mean " +
                                  std::to_string(s.mean()));
        }
        for (const auto& [node, period] : cfg.periodic_sources)
            if (period < 1)
                throw DomainError("periodic injection needs a period >= 1");

        const auto nq = model.queues().size();
        service_.resize(nq);
        int horizon = 1;
        for (std::size_t q = 0; q < nq; ++q)
            service_[q] = static_cast<int>(model.queue(static_cast<QueueId>(q)).service.mean());
        for (const auto& c : classes_)
            for (const auto& h : c.route)
                horizon = std::max(horizon, service_[static_cast<std::size_t>(h.queue)] +
                                                model.server(h.server).transit_latency + 1);
        calendar_.resize(static_cast<std::size_t>(horizon));

        queues_.resize(nq);
        port_free_.assign(nq, 0);
        last_change_.assign(nq, cfg.warmup_cycles);
        server_free_.assign(model.servers().size(), 0);
        last_start_.assign(model.servers().size(), -1);
        levels_.resize(model.servers().size());
        rr_.resize(model.servers().size());
        for (const auto& s : model.servers()) {
            auto& lv = levels_[static_cast<std::size_t>(s.id)];
            for (QueueId q : s.contenders) {
                if (lv.empty() || model.queue(lv.back().front()).level != model.queue(q).level)
                    lv.emplace_back();
                lv.back().push_back(q);
            }
            rr_[static_cast<std::size_t>(s.id)].assign(lv.size(), 0);
        }

        report_.measured_cycles = cfg.total_cycles - cfg.warmup_cycles;
        report_.queues.resize(nq);
        report_.service_gaps.resize(model.servers().size());
        report_.classes.reserve(classes_.size());
        for (const auto& c : classes_) {
            report_.classes.push_back({c.source, c.destination, {}, std::vector<RunningStat>(c.route.size()), {}});
            std::vector<QueueId> qs;
            for (const auto& h : c.route)
                qs.push_back(h.queue);
            report_.class_queues.push_back(std::move(qs));
        }
        last_injection_.assign(classes_.size(), -1);

        for (NodeId n = 0; n < model.node_count(); ++n) {
            Source src{n, {}, {}, RngStream(cfg.seed, static_cast<std::uint64_t>(n)), 0, 0};
            double acc = 0.0;
            for (const auto& c : classes_) {
                if (c.source != n)
                    continue;
                acc += c.rate;
                src.classes.push_back(c.id);
                src.cumulative.push_back(acc);
            }
            if (src.classes.empty())
                continue;
            if (auto it = cfg.periodic_sources.find(n); it != cfg.periodic_sources.end())
                src.period = it->second;
            sources_.push_back(std::move(src));
        }
    }

    SimReport run() {
        for (std::uint64_t t = 0; t < cfg_.total_cycles; ++t) {
            now_ = t;
            if (t == cfg_.warmup_cycles + report_.measured_cycles / 2)
                for (std::size_t q = 0; q < queues_.size(); ++q)
                    report_.queues[q].size_at_midpoint = queues_[q].size();
            land();
            inject();
            arbitrate();
        }
        finish();
        return std::move(report_);
    }

private:
    bool measuring() const { return now_ >= cfg_.warmup_cycles; }

    void trace(const char* event, QueueId q, const Flit& f) {
        if (cfg_.trace)
            *cfg_.trace << now_ << ',' << event << ',' << q << ',' << f.cls << ',' << f.id << '\n';
    }

    // Flits waiting in q change now; account the area up to this cycle.
    void touch(std::size_t q) {
        if (!measuring())
            return;
        report_.queues[q].occupancy_area +=
            static_cast<double>(queues_[q].size()) * static_cast<double>(now_ - last_change_[q]);
        last_change_[q] = now_;
    }

    void enqueue(std::uint32_t fi, QueueId q) {
        auto& f = flits_[fi];
        f.arrived = now_;
        const auto qi = static_cast<std::size_t>(q);
        touch(qi);
        queues_[qi].push_back(fi);
        if (measuring())
            ++report_.queues[qi].arrivals;
    }

    std::uint32_t allocate(int cls) {
        std::uint32_t fi;
        if (!free_.empty()) {
            fi = free_.back();
            free_.pop_back();
        } else {
            fi = static_cast<std::uint32_t>(flits_.size());
            flits_.emplace_back();
        }
        flits_[fi] = {next_id_++, now_, now_, cls, 0};
        return fi;
    }

    void land() {
        auto& bucket = calendar_[now_ % calendar_.size()];
        for (const auto& p : bucket) {
            auto& f = flits_[p.flit];
            const auto& cls = classes_[static_cast<std::size_t>(f.cls)];
            if (p.deliver) {
                trace("deliver", cls.route.back().queue, f);
                ++report_.delivered;
                if (f.injected >= cfg_.warmup_cycles)
                    report_.classes[static_cast<std::size_t>(f.cls)].latency.add(static_cast<double>(now_ - f.injected));
                free_.push_back(p.flit);
            } else {
                const QueueId q = cls.route[static_cast<std::size_t>(f.hop)].queue;
                enqueue(p.flit, q);
                trace("arrive", q, f);
            }
        }
        bucket.clear();
    }

    void inject() {
        for (auto& src : sources_) {
            int cls = -1;
            if (src.period > 0) {
                if (now_ % static_cast<std::uint64_t>(src.period) == 0) {
                    cls = src.classes[src.next_class];
                    src.next_class = (src.next_class + 1) % src.classes.size();
                }
            } else {
                const double u = src.rng.uniform();
                const auto it = std::upper_bound(src.cumulative.begin(), src.cumulative.end(), u);
                if (it != src.cumulative.end())
                    cls = src.classes[static_cast<std::size_t>(it - src.cumulative.begin())];
            }
            if (cls < 0)
                continue;
            const auto ci = static_cast<std::size_t>(cls);
            if (now_ >= cfg_.warmup_cycles && last_injection_[ci] >= static_cast<long long>(cfg_.warmup_cycles))
                report_.classes[ci].injection_gap.add(static_cast<double>(now_) - static_cast<double>(last_injection_[ci]));
            last_injection_[ci] = static_cast<long long>(now_);
            ++report_.injected;
            const auto fi = allocate(cls);
            const QueueId q = classes_[ci].route.front().queue;
            enqueue(fi, q);
            trace("inject", q, flits_[fi]);
        }
    }

    bool eligible(QueueId q, ServerId s) const {
        const auto qi = static_cast<std::size_t>(q);
        if (queues_[qi].empty() || port_free_[qi] > now_)
            return false;
        const auto& f = flits_[queues_[qi].front()];
        return classes_[static_cast<std::size_t>(f.cls)].route[static_cast<std::size_t>(f.hop)].server == s;
    }

    void arbitrate() {
        for (std::size_t s = 0; s < levels_.size(); ++s) {
            if (server_free_[s] > now_)
                continue;
            auto& lv = levels_[s];
            for (std::size_t l = 0; l < lv.size(); ++l) {
                const auto n = lv[l].size();
                auto& ptr = rr_[s][l];
                bool granted = false;
                for (std::size_t i = 0; i < n; ++i) {
                    const std::size_t idx = (ptr + i) % n;
                    if (eligible(lv[l][idx], static_cast<ServerId>(s))) {
                        grant(lv[l][idx], static_cast<ServerId>(s));
                        ptr = (idx + 1) % n;
                        granted = true;
                        break;
                    }
                }
                if (granted)
                    break;
            }
        }
    }

    void grant(QueueId q, ServerId s) {
        const auto qi = static_cast<std::size_t>(q);
        const auto si = static_cast<std::size_t>(s);
        touch(qi);
        const auto fi = queues_[qi].front();
        queues_[qi].pop_front();
        auto& f = flits_[fi];
        trace("grant", q, f);

        const auto wait = static_cast<double>(now_ - f.arrived);
        if (f.injected >= cfg_.warmup_cycles)
            report_.classes[static_cast<std::size_t>(f.cls)].waiting[static_cast<std::size_t>(f.hop)].add(wait);
        if (f.arrived >= cfg_.warmup_cycles)
            report_.queues[qi].waiting.add(wait);
        if (measuring()) {
            if (last_start_[si] >= static_cast<long long>(cfg_.warmup_cycles))
                report_.service_gaps[si].add(static_cast<double>(now_) - static_cast<double>(last_start_[si]));
            last_start_[si] = static_cast<long long>(now_);
        }

        const int service = service_[qi];
        port_free_[qi] = now_ + static_cast<std::uint64_t>(service);
        server_free_[si] = port_free_[qi];
        const auto& route = classes_[static_cast<std::size_t>(f.cls)].route;
        const auto due = now_ + static_cast<std::uint64_t>(service + model_.server(s).transit_latency);
        const bool last = static_cast<std::size_t>(f.hop) + 1 == route.size();
        if (!last)
            ++f.hop;
        calendar_[due % calendar_.size()].push_back({fi, last});
    }

    void finish() {
        now_ = cfg_.total_cycles;
        std::uint64_t waiting = 0;
        for (std::size_t q = 0; q < queues_.size(); ++q) {
            touch(q);
            auto& tally = report_.queues[q];
            tally.final_size = queues_[q].size();
            waiting += tally.final_size;
            tally.unbounded_growth = tally.final_size >= 200 &&
                                     static_cast<double>(tally.final_size) > 1.5 * static_cast<double>(tally.size_at_midpoint);
        }
        std::uint64_t transit = 0;
        for (const auto& b : calendar_)
            transit += b.size();
        report_.in_flight = waiting + transit;
        if (report_.injected != report_.delivered + report_.in_flight)
            throw ConsistencyError("flit accounting does not balance");
    }

    const NocModel& model_;
    const SimConfig& cfg_;
    std::vector<TrafficClass> classes_;
    std::vector<int> service_;
    std::vector<std::deque<std::uint32_t>> queues_;
    std::vector<std::uint64_t> port_free_;
    std::vector<std::uint64_t> server_free_;
    std::vector<std::uint64_t> last_change_;
    std::vector<long long> last_start_;
    std::vector<long long> last_injection_;
    std::vector<std::vector<std::vector<QueueId>>> levels_;
    std::vector<std::vector<std::size_t>> rr_;
    std::vector<std::vector<Pending>> calendar_;
    std::vector<Flit> flits_;
    std::vector<std::uint32_t> free_;
    std::vector<Source> sources_;
    std::uint64_t now_ = 0;
    std::uint64_t next_id_ = 0;
    SimReport report_;
};

}  // namespace

SimReport simulate(const NocModel& model, const TrafficMatrix& matrix, const SimConfig& config) {
    return Simulation(model, matrix, config).run();
}

double measure_interarrival_cv(const SimReport& report, int class_id) {
    const auto& gaps = report.classes.at(static_cast<std::size_t>(class_id)).injection_gap;
    if (gaps.count() + 1 < 10'000)
        throw DiagnosticsError("class " + std::to_string(class_id) + " has only " + std::to_string(gaps.count() + 1) +
                               " injections, need 10000");
    return gaps.cv2();
}

double littles_law_check(const SimReport& report, QueueId queue) {
    const auto& t = report.queues.at(static_cast<std::size_t>(queue));
    if (t.arrivals == 0 || t.waiting.count() == 0)
        return 0.0;
    const double window = static_cast<double>(report.measured_cycles);
    const double occupancy = t.occupancy_area / window;
    const double little = static_cast<double>(t.arrivals) / window * t.waiting.mean();
    if (little == 0.0)
        return occupancy == 0.0 ? 0.0 : 1.0;
    return std::abs(occupancy - little) / little;
}

}  // namespace nocprio
