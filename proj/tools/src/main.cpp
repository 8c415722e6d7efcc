#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "nocprio_cli/commands.hpp"

using namespace nocprio::cli;

int main(int argc, char** argv) {
    CLI::App app{"Priority NoC latency analysis and simulation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::optional<std::uint64_t> seed;
    bool dump = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Run configuration (JSON)")->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "Output directory (overrides the config)");
        sub->add_option("--jobs", jobs, "Worker threads for sweeps")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "Simulation seed (overrides the config)");
        sub->add_flag("--dump-config", dump, "Print the effective configuration and exit");
    };

    auto* analyze = app.add_subcommand("analyze", "Analytical per-pair latency -> analytical.csv");
    auto* simulate = app.add_subcommand("simulate", "Cycle-accurate simulation -> simulated.csv");
    auto* sweep = app.add_subcommand("sweep", "Latency versus injection rate -> sweep.csv");
    auto* compare = app.add_subcommand("compare", "Per-pair MAPE between two reports -> compare.csv");
    for (auto* sub : {analyze, simulate, sweep, compare})
        add_common(sub);

    std::string analytical_csv, simulated_csv;
    compare->add_option("analytical", analytical_csv, "Analytical report (default <out>/analytical.csv)");
    compare->add_option("simulated", simulated_csv, "Simulated report (default <out>/simulated.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? ok : config_error;
    }

    return guarded(std::cerr, [&]() -> int {
        RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
        if (!out_dir.empty())
            config.output = out_dir;
        if (seed)
            config.simulation.seed = *seed;
        if (dump) {
            std::cout << dump_config(config);
            return ok;
        }
        if (analyze->parsed())
            return cmd_analyze(config, std::cout);
        if (simulate->parsed())
            return cmd_simulate(config, std::cout);
        if (sweep->parsed())
            return cmd_sweep(config, jobs, std::cout);
        const std::filesystem::path dir(config.output);
        return cmd_compare(analytical_csv.empty() ? dir / "analytical.csv" : std::filesystem::path(analytical_csv),
                           simulated_csv.empty() ? dir / "simulated.csv" : std::filesystem::path(simulated_csv), dir,
                           std::cout);
    });
}
