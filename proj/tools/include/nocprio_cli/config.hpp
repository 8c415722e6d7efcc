#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nocprio/network_model.hpp>
#include <nocprio/simulator.hpp>
#include <nocprio/traffic.hpp>

namespace nocprio::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TopologyConfig {
    std::string kind = "ring";  // ring | mesh
    int nodes = 8;              // ring
    int width = 6;              // mesh
    int height = 6;             // mesh
    double service_time = 2.0;
    double service_second_moment = 4.0;
    int link_latency = 1;
    int switch_latency = 1;

    friend bool operator==(const TopologyConfig&, const TopologyConfig&) = default;
};

struct TrafficConfig {
    std::string pattern = "uniform";  // uniform | matrix
    std::optional<double> rate;       // uniform: flits/cycle per pair
    std::optional<double> fraction_of_lambda_max;
    std::string matrix_file;          // absolute after parsing

    friend bool operator==(const TrafficConfig&, const TrafficConfig&) = default;
};

struct SweepConfig {
    std::vector<double> fractions;
    bool simulate = true;

    friend bool operator==(const SweepConfig&, const SweepConfig&) = default;
};

struct SimulationConfig {
    std::uint64_t cycles = 1'000'000;
    std::uint64_t warmup = 5000;
    std::uint64_t seed = 1;

    friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

struct RunConfig {
    TopologyConfig topology;
    TrafficConfig traffic;
    SweepConfig sweep;
    SimulationConfig simulation;
    std::string output = "out";

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Relative matrix paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
std::string dump_config(const RunConfig& config);

NocModel make_model(const RunConfig& config);
// Traffic shape before any lambda_max scaling.
TrafficMatrix make_shape(const RunConfig& config, const NocModel& model);
SimConfig make_sim_config(const RunConfig& config);

}  // namespace nocprio::cli
