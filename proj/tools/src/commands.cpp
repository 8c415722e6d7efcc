#include "nocprio_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <thread>

#include <nocprio/analysis.hpp>
#include <nocprio/simulator.hpp>

namespace nocprio::cli {

namespace {

std::filesystem::path prepare_output(const RunConfig& c) {
    std::filesystem::path dir(c.output);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

TrafficMatrix scaled_traffic(const RunConfig& c, const NocModel& model) {
    const auto shape = make_shape(c, model);
    return shape.scaled(traffic_scale(c, model, shape));
}

// Runs f(i) for i in [0, n) on up to `jobs` threads.
template <class F>
void parallel_for(std::size_t n, int jobs, F f) {
    const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w)
        pool.emplace_back(work);
    work();
    pool.clear();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

}  // namespace

double traffic_scale(const RunConfig& c, const NocModel& model, const TrafficMatrix& shape) {
    if (c.traffic.fraction_of_lambda_max)
        return *c.traffic.fraction_of_lambda_max * stable_lambda_max(model, shape);
    if (c.traffic.pattern == "uniform") {
        if (!c.traffic.rate)
            throw ConfigError("uniform traffic needs traffic.rate or traffic.fraction_of_lambda_max");
        return *c.traffic.rate;
    }
    return 1.0;
}

int cmd_analyze(const RunConfig& c, std::ostream& log) {
    const auto model = make_model(c);
    const auto matrix = scaled_traffic(c, model);
    const auto classes = instantiate_classes(model, matrix);
    const auto report = end_to_end(model, classes, analyze(model, classes));
    const auto path = prepare_output(c) / "analytical.csv";
    report.write_csv(path);
    log << "pairs: " << report.rows().size() << '\n';
    if (const auto mean = report.mean_analytical())
        log << "mean analytical latency: " << fixed6(*mean) << " cycles\n";
    log << "wrote " << path.string() << '\n';
    return ok;
}

int cmd_simulate(const RunConfig& c, std::ostream& log) {
    const auto model = make_model(c);
    const auto matrix = scaled_traffic(c, model);
    const auto sim = simulate(model, matrix, make_sim_config(c));
    const auto report = sim.to_latency_report();
    const auto path = prepare_output(c) / "simulated.csv";
    report.write_csv(path);
    log << "pairs: " << report.rows().size() << "  injected: " << sim.injected << "  delivered: " << sim.delivered
        << '\n';
    if (const auto mean = report.mean_simulated())
        log << "mean simulated latency: " << fixed6(*mean) << " cycles\n";
    for (QueueId q : sim.unstable_queues())
        log << "warning: queue " << model.queue(q).name << " grows without bound\n";
    log << "wrote " << path.string() << '\n';
    return ok;
}

std::vector<SweepPoint> run_sweep(const RunConfig& c, int jobs) {
    if (c.sweep.fractions.empty())
        throw ConfigError("sweep.fractions is empty");
    const auto model = make_model(c);
    const auto shape = make_shape(c, model);
    const double limit = stable_lambda_max(model, shape);
    std::vector<SweepPoint> points(c.sweep.fractions.size());
    parallel_for(points.size(), jobs, [&](std::size_t i) {
        const double f = c.sweep.fractions[i];
        const auto matrix = shape.scaled(f * limit);
        const auto classes = instantiate_classes(model, matrix);
        const auto ana = end_to_end(model, classes, analyze(model, classes));
        SweepPoint p{f, ana.mean_analytical().value_or(0.0), std::nullopt, std::nullopt};
        if (c.sweep.simulate) {
            const auto sim = simulate(model, matrix, make_sim_config(c)).to_latency_report();
            p.sim_mean = sim.mean_simulated().value_or(0.0);
            p.mape = compare(ana, sim).mean_mape;
        }
        points[i] = p;
    });
    return points;
}

int cmd_sweep(const RunConfig& c, int jobs, std::ostream& log) {
    const auto points = run_sweep(c, jobs);
    const auto path = prepare_output(c) / "sweep.csv";
    std::ofstream out(path);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << "fraction_of_lambda_max,analytical_mean,sim_mean,mape\n";
    for (const auto& p : points) {
        out << fixed6(p.fraction) << ',' << fixed6(p.analytical_mean) << ','
            << (p.sim_mean ? fixed6(*p.sim_mean) : "") << ',' << (p.mape ? fixed6(*p.mape) : "") << '\n';
        log << "fraction " << fixed6(p.fraction) << "  analytical " << fixed6(p.analytical_mean);
        if (p.sim_mean)
            log << "  simulated " << fixed6(*p.sim_mean) << "  mape " << fixed6(*p.mape) << '%';
        log << '\n';
    }
    log << "wrote " << path.string() << '\n';
    return ok;
}

int cmd_compare(const std::filesystem::path& analytical, const std::filesystem::path& simulated,
                const std::filesystem::path& out_dir, std::ostream& log) {
    const auto a = LatencyReport::read_csv(analytical);
    const auto s = LatencyReport::read_csv(simulated);
    Comparison cmp;
    try {
        cmp = compare(a, s);
    } catch (const ConsistencyError& e) {
        log << "mismatch: " << e.what() << '\n';
        return compare_mismatch;
    }
    std::filesystem::create_directories(out_dir);
    const auto path = out_dir / "compare.csv";
    cmp.merged.write_csv(path);
    log << "mean mape: " << fixed6(cmp.mean_mape) << "%\nmax mape: " << fixed6(cmp.max_mape) << "%\n";
    for (const auto& [src, dst] : cmp.excluded)
        log << "excluded " << src << "->" << dst << ": zero simulated latency\n";
    log << "wrote " << path.string() << '\n';
    return ok;
}

}  // namespace nocprio::cli
