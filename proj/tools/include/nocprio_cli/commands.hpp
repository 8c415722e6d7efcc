#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include <nocprio/errors.hpp>

#include "nocprio_cli/config.hpp"

namespace nocprio::cli {

enum ExitCode : int { ok = 0, config_error = 1, stability_error = 2, compare_mismatch = 3 };

struct SweepPoint {
    double fraction;
    double analytical_mean;
    std::optional<double> sim_mean;
    std::optional<double> mape;  // mean per-pair MAPE
};

// Scale applied to the traffic shape for an analyze/simulate run.
double traffic_scale(const RunConfig& config, const NocModel& model, const TrafficMatrix& shape);

// Each command writes its CSV into config.output and a summary to `log`.
int cmd_analyze(const RunConfig& config, std::ostream& log);
int cmd_simulate(const RunConfig& config, std::ostream& log);
int cmd_sweep(const RunConfig& config, int jobs, std::ostream& log);
int cmd_compare(const std::filesystem::path& analytical, const std::filesystem::path& simulated,
                const std::filesystem::path& out_dir, std::ostream& log);

std::vector<SweepPoint> run_sweep(const RunConfig& config, int jobs);

// Maps library exceptions to exit codes; `body` returns the success code.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const StabilityError& e) {
        err << "unstable: " << e.what() << " [" << e.where() << "]\n";
        return stability_error;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << '\n';
    } catch (const DomainError& e) {
        err << "invalid parameter: " << e.what() << '\n';
    } catch (const ConsistencyError& e) {
        err << "inconsistent input: " << e.what() << '\n';
    }
    return config_error;
}

}  // namespace nocprio::cli
