#include "nocprio_cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include <nocprio/errors.hpp>
#include <nocprio/moments.hpp>

namespace nocprio::cli {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        throw ConfigError("'" + section + "' must be an object");
    std::set<std::string> known(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items())
        if (!known.count(key))
            throw ConfigError("unknown key '" + key + "' in '" + section + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& section) {
    if (!obj.contains(key))
        return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("'" + section + "." + key + "' has the wrong type");
    }
}

template <class T>
void read_optional(const json& obj, const char* key, std::optional<T>& out, const std::string& section) {
    if (!obj.contains(key) || obj.at(key).is_null())
        return;
    T v{};
    read(obj, key, v, section);
    out = v;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(root, "config", {"topology", "traffic", "sweep", "simulation", "output"});
    RunConfig c;

    if (root.contains("topology")) {
        const auto& t = root["topology"];
        reject_unknown(t, "topology", {"kind", "nodes", "width", "height", "service_time", "service_second_moment",
                                       "link_latency", "switch_latency"});
        read(t, "kind", c.topology.kind, "topology");
        read(t, "nodes", c.topology.nodes, "topology");
        read(t, "width", c.topology.width, "topology");
        read(t, "height", c.topology.height, "topology");
        read(t, "service_time", c.topology.service_time, "topology");
        c.topology.service_second_moment = c.topology.service_time * c.topology.service_time;
        read(t, "service_second_moment", c.topology.service_second_moment, "topology");
        read(t, "link_latency", c.topology.link_latency, "topology");
        c.topology.switch_latency = c.topology.link_latency;
        read(t, "switch_latency", c.topology.switch_latency, "topology");
    }
    if (c.topology.kind != "ring" && c.topology.kind != "mesh")
        throw ConfigError("topology.kind must be 'ring' or 'mesh'");

    if (root.contains("traffic")) {
        const auto& t = root["traffic"];
        reject_unknown(t, "traffic", {"pattern", "rate", "fraction_of_lambda_max", "matrix_file"});
        read(t, "pattern", c.traffic.pattern, "traffic");
        read_optional(t, "rate", c.traffic.rate, "traffic");
        read_optional(t, "fraction_of_lambda_max", c.traffic.fraction_of_lambda_max, "traffic");
        read(t, "matrix_file", c.traffic.matrix_file, "traffic");
    }
    if (c.traffic.pattern != "uniform" && c.traffic.pattern != "matrix")
        throw ConfigError("traffic.pattern must be 'uniform' or 'matrix'");
    if (c.traffic.rate && c.traffic.fraction_of_lambda_max)
        throw ConfigError("give traffic.rate or traffic.fraction_of_lambda_max, not both");
    if (c.traffic.pattern == "matrix") {
        if (c.traffic.rate)
            throw ConfigError("traffic.rate applies to the uniform pattern only");
        if (c.traffic.matrix_file.empty())
            throw ConfigError("traffic.matrix_file is required for the matrix pattern");
        std::filesystem::path p(c.traffic.matrix_file);
        if (p.is_relative())
            p = base_dir / p;
        p = std::filesystem::absolute(p).lexically_normal();
        if (!std::filesystem::exists(p))
            throw ConfigError("traffic matrix file not found: " + p.string());
        c.traffic.matrix_file = p.string();
    } else if (!c.traffic.matrix_file.empty()) {
        throw ConfigError("traffic.matrix_file applies to the matrix pattern only");
    }
    if (c.traffic.fraction_of_lambda_max &&
        !(*c.traffic.fraction_of_lambda_max > 0.0 && *c.traffic.fraction_of_lambda_max < 1.0))
        throw ConfigError("traffic.fraction_of_lambda_max must lie in (0,1)");

    if (root.contains("sweep")) {
        const auto& s = root["sweep"];
        reject_unknown(s, "sweep", {"fractions", "simulate"});
        read(s, "fractions", c.sweep.fractions, "sweep");
        read(s, "simulate", c.sweep.simulate, "sweep");
    }
    for (double f : c.sweep.fractions)
        if (!(f > 0.0 && f < 1.0))
            throw ConfigError("sweep fractions must lie in (0,1)");

    if (root.contains("simulation")) {
        const auto& s = root["simulation"];
        reject_unknown(s, "simulation", {"cycles", "warmup", "seed"});
        read(s, "cycles", c.simulation.cycles, "simulation");
        read(s, "warmup", c.simulation.warmup, "simulation");
        read(s, "seed", c.simulation.seed, "simulation");
    }
    if (c.simulation.warmup >= c.simulation.cycles)
        throw ConfigError("simulation.warmup must be below simulation.cycles");

    read(root, "output", c.output, "config");
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::string dump_config(const RunConfig& c) {
    json t = {{"kind", c.topology.kind},
              {"nodes", c.topology.nodes},
              {"width", c.topology.width},
              {"height", c.topology.height},
              {"service_time", c.topology.service_time},
              {"service_second_moment", c.topology.service_second_moment},
              {"link_latency", c.topology.link_latency},
              {"switch_latency", c.topology.switch_latency}};
    json tr = {{"pattern", c.traffic.pattern}};
    if (c.traffic.rate)
        tr["rate"] = *c.traffic.rate;
    if (c.traffic.fraction_of_lambda_max)
        tr["fraction_of_lambda_max"] = *c.traffic.fraction_of_lambda_max;
    if (!c.traffic.matrix_file.empty())
        tr["matrix_file"] = c.traffic.matrix_file;
    json root = {{"topology", t},
                 {"traffic", tr},
                 {"sweep", {{"fractions", c.sweep.fractions}, {"simulate", c.sweep.simulate}}},
                 {"simulation",
                  {{"cycles", c.simulation.cycles}, {"warmup", c.simulation.warmup}, {"seed", c.simulation.seed}}},
                 {"output", c.output}};
    return root.dump(2) + "\n";
}

NocModel make_model(const RunConfig& c) {
    try {
        const auto svc = general_service(c.topology.service_time, c.topology.service_second_moment);
        if (c.topology.kind == "ring")
            return build_ring(c.topology.nodes, svc, c.topology.link_latency);
        return build_mesh(c.topology.width, c.topology.height, svc, c.topology.link_latency,
                          c.topology.switch_latency);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid topology: ") + e.what());
    }
}

TrafficMatrix make_shape(const RunConfig& c, const NocModel& model) {
    if (c.traffic.pattern == "matrix")
        return load_traffic_matrix(std::filesystem::path(c.traffic.matrix_file), model);
    return uniform_pattern(model);
}

SimConfig make_sim_config(const RunConfig& c) {
    SimConfig s;
    s.total_cycles = c.simulation.cycles;
    s.warmup_cycles = c.simulation.warmup;
    s.seed = c.simulation.seed;
    return s;
}

}  // namespace nocprio::cli
