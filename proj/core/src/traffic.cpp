#include "nocprio/traffic.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

#include "nocprio/errors.hpp"

namespace nocprio {

namespace {

std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_rate(const std::string& s, int line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
        throw FormatError("line " + std::to_string(line_no) + ": invalid rate '" + s + "'");
    return v;
}

}  // namespace

void TrafficMatrix::set(NodeId src, NodeId dst, double rate) {
    if (src < 0 || dst < 0 || src >= nodes_ || dst >= nodes_)
        throw DomainError("traffic endpoint out of range: " + std::to_string(src) + " -> " + std::to_string(dst));
    if (src == dst)
        throw DomainError("traffic from node " + std::to_string(src) + " to itself");
    if (!std::isfinite(rate) || rate < 0.0)
        throw DomainError("traffic rate must be >= 0, got " + std::to_string(rate));
    if (rate == 0.0)
        entries_.erase({src, dst});
    else
        entries_[{src, dst}] = rate;
}

double TrafficMatrix::rate(NodeId src, NodeId dst) const {
    const auto it = entries_.find({src, dst});
    return it == entries_.end() ? 0.0 : it->second;
}

double TrafficMatrix::source_total(NodeId src) const {
    double total = 0.0;
    for (auto it = entries_.lower_bound({src, std::numeric_limits<NodeId>::min()});
         it != entries_.end() && it->first.first == src; ++it)
        total += it->second;
    return total;
}

TrafficMatrix TrafficMatrix::scaled(double factor) const {
    if (!std::isfinite(factor) || factor < 0.0)
        throw DomainError("traffic scale must be >= 0, got " + std::to_string(factor));
    TrafficMatrix out(nodes_);
    for (const auto& [pair, rate] : entries_)
        out.set(pair.first, pair.second, rate * factor);
    return out;
}

TrafficMatrix uniform_traffic(const NocModel& model, double rate_per_pair) {
    TrafficMatrix m(model.node_count());
    for (NodeId s = 0; s < model.node_count(); ++s)
        for (NodeId d = 0; d < model.node_count(); ++d)
            if (model.has_route(s, d))
                m.set(s, d, rate_per_pair);
    for (NodeId s = 0; s < model.node_count(); ++s)
        if (m.source_total(s) >= 1.0)
            throw DomainError("uniform rate " + std::to_string(rate_per_pair) + " gives node " +
                              std::to_string(s) + " a total injection rate >= 1");
    return m;
}

TrafficMatrix uniform_pattern(const NocModel& model) {
    TrafficMatrix m(model.node_count());
    for (NodeId s = 0; s < model.node_count(); ++s)
        for (NodeId d = 0; d < model.node_count(); ++d)
            if (model.has_route(s, d))
                m.set(s, d, 1.0);
    return m;
}

TrafficMatrix load_traffic_matrix(std::istream& in, const NocModel& model) {
    std::string line;
    int line_no = 0;
    bool header = false;
    TrafficMatrix m(model.node_count());
    std::map<TrafficMatrix::Pair, int> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        const auto cells = split_csv(line);
        if (!header) {
            if (cells != std::vector<std::string>{"source", "destination", "rate"})
                throw FormatError("expected header 'source,destination,rate', got '" + trim(line) + "'");
            header = true;
            continue;
        }
        if (cells.size() != 3)
            throw FormatError("line " + std::to_string(line_no) + ": expected 3 fields");
        NodeId src = 0, dst = 0;
        try {
            src = model.parse_node(cells[0]);
            dst = model.parse_node(cells[1]);
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        const double rate = parse_rate(cells[2], line_no);
        if (src == dst)
            throw FormatError("line " + std::to_string(line_no) + ": source equals destination");
        if (rate < 0.0)
            throw FormatError("line " + std::to_string(line_no) + ": negative rate");
        if (auto [it, fresh] = seen.emplace(TrafficMatrix::Pair{src, dst}, line_no); !fresh)
            throw FormatError("line " + std::to_string(line_no) + ": duplicate pair already given on line " +
                              std::to_string(it->second));
        m.set(src, dst, rate);
    }
    if (!header)
        throw FormatError("traffic matrix is missing its header");
    for (NodeId s = 0; s < model.node_count(); ++s)
        if (m.source_total(s) >= 1.0)
            throw DomainError("node " + std::to_string(s) + " injects a total rate >= 1");
    return m;
}

TrafficMatrix load_traffic_matrix(const std::filesystem::path& path, const NocModel& model) {
    std::ifstream in(path);
    if (!in)
        throw FormatError("cannot open traffic matrix " + path.string());
    return load_traffic_matrix(in, model);
}

namespace {

std::vector<TrafficClass> build_classes(const NocModel& model, const TrafficMatrix& matrix, bool check_totals) {
    if (matrix.node_count() != model.node_count())
        throw ConsistencyError("traffic matrix has " + std::to_string(matrix.node_count()) +
                               " nodes, model has " + std::to_string(model.node_count()));
    std::vector<TrafficClass> out;
    out.reserve(matrix.entries().size());
    NodeId last_src = -1;
    for (const auto& [pair, rate] : matrix.entries()) {
        if (check_totals && pair.first != last_src) {
            last_src = pair.first;
            if (matrix.source_total(last_src) >= 1.0)
                throw DomainError("node " + std::to_string(last_src) + " injects a total rate >= 1");
        }
        out.push_back({static_cast<int>(out.size()), pair.first, pair.second, rate,
                       model.route(pair.first, pair.second)});
    }
    return out;
}

}  // namespace

std::vector<TrafficClass> instantiate_classes(const NocModel& model, const TrafficMatrix& matrix) {
    return build_classes(model, matrix, true);
}

double lambda_max(const NocModel& model, const TrafficMatrix& shape) {
    std::vector<double> queue_load(model.queues().size(), 0.0);
    std::vector<double> server_load(model.servers().size(), 0.0);
    for (const auto& c : build_classes(model, shape, false)) {
        for (const auto& hop : c.route) {
            const double busy = c.rate * model.queue(hop.queue).service.mean();
            queue_load[static_cast<std::size_t>(hop.queue)] += busy;
            server_load[static_cast<std::size_t>(hop.server)] += busy;
        }
    }
    double worst = 0.0;
    for (double v : queue_load) worst = std::max(worst, v);
    for (double v : server_load) worst = std::max(worst, v);
    // A source also cannot inject more than one flit per cycle.
    for (NodeId s = 0; s < model.node_count(); ++s)
        worst = std::max(worst, shape.source_total(s));
    return worst == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / worst;
}

}  // namespace nocprio
