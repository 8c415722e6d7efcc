#include "nocprio/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "nocprio/errors.hpp"

namespace nocprio {

namespace {

constexpr const char* header = "source,destination,class,analytical_latency,sim_latency,mape";

std::string fixed6(const std::optional<double>& v) {
    if (!v)
        return {};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

template <class T>
T parse_number(const std::string& s, int line_no) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw FormatError("line " + std::to_string(line_no) + ": invalid number '" + s + "'");
    return v;
}

std::optional<double> parse_optional(const std::string& s, int line_no) {
    if (s.empty())
        return std::nullopt;
    return parse_number<double>(s, line_no);
}

std::optional<double> mean_of(const std::vector<LatencyRow>& rows, std::optional<double> LatencyRow::*field) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : rows) {
        if (const auto& v = r.*field) {
            sum += *v;
            ++n;
        }
    }
    if (n == 0)
        return std::nullopt;
    return sum / static_cast<double>(n);
}

using Key = std::tuple<NodeId, NodeId, int>;

}  // namespace

std::optional<double> LatencyReport::mean_analytical() const { return mean_of(rows_, &LatencyRow::analytical); }
std::optional<double> LatencyReport::mean_simulated() const { return mean_of(rows_, &LatencyRow::simulated); }

void LatencyReport::write_csv(std::ostream& out) const {
    out << header << '\n';
    for (const auto& r : rows_)
        out << r.source << ',' << r.destination << ',' << r.class_id << ',' << fixed6(r.analytical) << ','
            << fixed6(r.simulated) << ',' << fixed6(r.mape) << '\n';
}

void LatencyReport::write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out)
        throw FormatError("cannot write " + path.string());
    write_csv(out);
}

LatencyReport LatencyReport::read_csv(std::istream& in) {
    std::string line;
    int line_no = 0;
    bool have_header = false;
    std::vector<LatencyRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (!have_header) {
            if (line != header)
                throw FormatError("expected header '" + std::string(header) + "'");
            have_header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        if (line.back() == ',')
            cells.emplace_back();
        if (cells.size() != 6)
            throw FormatError("line " + std::to_string(line_no) + ": expected 6 fields");
        rows.push_back({parse_number<int>(cells[0], line_no), parse_number<int>(cells[1], line_no),
                        parse_number<int>(cells[2], line_no), parse_optional(cells[3], line_no),
                        parse_optional(cells[4], line_no), parse_optional(cells[5], line_no)});
    }
    if (!have_header)
        throw FormatError("latency report is missing its header");
    return LatencyReport(std::move(rows));
}

LatencyReport LatencyReport::read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open " + path.string());
    return read_csv(in);
}

double mape(double simulated, double analytical) {
    if (simulated == 0.0)
        throw DomainError("MAPE undefined for zero simulated latency");
    return 100.0 * std::abs(simulated - analytical) / std::abs(simulated);
}

Comparison compare(const LatencyReport& analytical, const LatencyReport& simulated) {
    std::map<Key, const LatencyRow*> sim;
    for (const auto& r : simulated.rows()) {
        if (!r.simulated)
            throw ConsistencyError("simulated report row " + std::to_string(r.source) + "->" +
                                   std::to_string(r.destination) + " has no simulated latency");
        if (!sim.emplace(Key{r.source, r.destination, r.class_id}, &r).second)
            throw ConsistencyError("simulated report repeats pair " + std::to_string(r.source) + "->" +
                                   std::to_string(r.destination));
    }
    if (sim.size() != analytical.rows().size())
        throw ConsistencyError("reports cover different pair sets (" + std::to_string(analytical.rows().size()) +
                               " vs " + std::to_string(sim.size()) + " rows)");

    Comparison out;
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& a : analytical.rows()) {
        if (!a.analytical)
            throw ConsistencyError("analytical report row " + std::to_string(a.source) + "->" +
                                   std::to_string(a.destination) + " has no analytical latency");
        const auto it = sim.find(Key{a.source, a.destination, a.class_id});
        if (it == sim.end())
            throw ConsistencyError("pair " + std::to_string(a.source) + "->" + std::to_string(a.destination) +
                                   " missing from the simulated report");
        LatencyRow row{a.source, a.destination, a.class_id, a.analytical, it->second->simulated, std::nullopt};
        if (*row.simulated == 0.0) {
            out.excluded.emplace_back(a.source, a.destination);
        } else {
            row.mape = mape(*row.simulated, *row.analytical);
            sum += *row.mape;
            out.max_mape = std::max(out.max_mape, *row.mape);
            ++n;
        }
        out.merged.rows().push_back(row);
    }
    out.mean_mape = n == 0 ? 0.0 : sum / static_cast<double>(n);
    return out;
}

}  // namespace nocprio
