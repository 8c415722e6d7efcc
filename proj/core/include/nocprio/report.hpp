#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "nocprio/network_model.hpp"

namespace nocprio {

struct LatencyRow {
    NodeId source;
    NodeId destination;
    int class_id;
    std::optional<double> analytical;
    std::optional<double> simulated;
    std::optional<double> mape;  // percent
};

// Per source/destination latencies; CSV header
// `source,destination,class,analytical_latency,sim_latency,mape`.
class LatencyReport {
public:
    LatencyReport() = default;
    explicit LatencyReport(std::vector<LatencyRow> rows) : rows_(std::move(rows)) {}

    const std::vector<LatencyRow>& rows() const noexcept { return rows_; }
    std::vector<LatencyRow>& rows() noexcept { return rows_; }
    bool empty() const noexcept { return rows_.empty(); }

    // Means over rows carrying the value; nullopt when none do.
    std::optional<double> mean_analytical() const;
    std::optional<double> mean_simulated() const;

    void write_csv(std::ostream& out) const;
    void write_csv(const std::filesystem::path& path) const;
    static LatencyReport read_csv(std::istream& in);
    static LatencyReport read_csv(const std::filesystem::path& path);

private:
    std::vector<LatencyRow> rows_;
};

// 100 * |sim - model| / sim.
double mape(double simulated, double analytical);

struct Comparison {
    LatencyReport merged;  // both latencies and mape where defined
    double mean_mape = 0.0;
    double max_mape = 0.0;
    std::vector<std::pair<NodeId, NodeId>> excluded;  // zero simulated latency
};

// Pairs are matched on (source, destination, class). Throws ConsistencyError
// when the pair sets differ.
Comparison compare(const LatencyReport& analytical, const LatencyReport& simulated);

}  // namespace nocprio
