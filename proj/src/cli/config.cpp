#include "cmx/cli/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cmx::cli {

using nlohmann::json;

namespace {

const std::vector<std::pair<Command, std::string>>& command_table() {
    static const std::vector<std::pair<Command, std::string>> t = {
        {Command::powerlaw, "powerlaw"},   {Command::delta_star, "delta-star"},
        {Command::local, "local"},         {Command::eig, "eig"},
        {Command::oracle_compare, "oracle-compare"}, {Command::demo_left, "demo-left"},
        {Command::verify, "verify"},
    };
    return t;
}

// JSON has no infinities; they are written as strings.
json num(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double get_num(const json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ConfigError("config: '" + key + "' must be a number");
}

template <class T>
T get_as(const json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: '" + key + "' has the wrong type");
    }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError("config: " + where + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError("config: unknown key '" + k + "' in " + where);
}

}  // namespace

std::string command_name(Command c) {
    for (const auto& [cmd, name] : command_table())
        if (cmd == c) return name;
    return "?";
}

Command command_from_name(const std::string& s) {
    for (const auto& [cmd, name] : command_table())
        if (name == s) return cmd;
    throw ConfigError("unknown command: " + s);
}

json to_json(const RunConfig& c) {
    json j;
    j["command"] = command_name(c.command);
    j["x0"] = c.x0;
    j["x0_list"] = c.x0_list;
    j["eps_lo"] = c.eps_lo;
    j["eps_hi"] = c.eps_hi;
    j["per_decade"] = c.per_decade;
    j["eps"] = c.eps;
    j["veps"] = c.veps;
    j["f0"] = c.f0;
    j["delta"] = c.delta ? json(*c.delta) : json(nullptr);
    j["slopes"] = c.slopes;
    j["trace_points"] = c.trace_points;
    j["trace_path"] = c.trace_path;
    j["mu"] = c.mu;
    j["points"] = c.points;
    j["K"] = c.K;
    j["c"] = c.c;
    j["p_scan"] = c.p_scan;
    j["only"] = c.only;
    j["json_report"] = c.json_report;
    j["output"] = c.output;
    j["format"] = c.format;
    j["seed"] = c.seed;
    j["workers"] = c.workers;
    j["quadrature"] = {
        {"mu_step", c.quad.mu_step},
        {"mu_max_override", c.quad.mu_max_override},
        {"mu_switch", num(c.quad.mu_switch)},
        {"nystrom_nodes", c.quad.nystrom_nodes},
        {"grid_points", c.quad.grid_points},
        {"oracle_grid", c.quad.oracle_grid},
    };
    j["tolerances"] = {
        {"tail_tol", c.tol.tail_tol}, {"tol_cert", c.tol.tol_cert}, {"prune", c.tol.prune},
        {"merge", c.tol.merge},       {"max_outer", c.tol.max_outer},
    };
    return j;
}

RunConfig config_from_json(const json& j, RunConfig c) {
    check_keys(j,
               {"command", "x0", "x0_list", "eps_lo", "eps_hi", "per_decade", "eps", "veps", "f0", "delta", "slopes",
                "trace_points", "trace_path", "mu", "points", "K", "c", "p_scan", "only", "json_report", "output",
                "format", "seed", "workers", "quadrature", "tolerances"},
               "config");
    auto has = [&](const char* k) { return j.contains(k); };
    if (has("command")) c.command = command_from_name(get_as<std::string>(j["command"], "command"));
    if (has("x0")) c.x0 = get_num(j["x0"], "x0");
    if (has("x0_list")) c.x0_list = get_as<std::vector<double>>(j["x0_list"], "x0_list");
    if (has("eps_lo")) c.eps_lo = get_num(j["eps_lo"], "eps_lo");
    if (has("eps_hi")) c.eps_hi = get_num(j["eps_hi"], "eps_hi");
    if (has("per_decade")) c.per_decade = get_as<int>(j["per_decade"], "per_decade");
    if (has("eps")) c.eps = get_as<std::vector<double>>(j["eps"], "eps");
    if (has("veps")) c.veps = get_as<std::vector<double>>(j["veps"], "veps");
    if (has("f0")) c.f0 = get_as<std::string>(j["f0"], "f0");
    if (has("delta")) {
        if (j["delta"].is_null()) c.delta.reset();
        else c.delta = get_num(j["delta"], "delta");
    }
    if (has("slopes")) c.slopes = get_as<bool>(j["slopes"], "slopes");
    if (has("trace_points")) c.trace_points = get_as<int>(j["trace_points"], "trace_points");
    if (has("trace_path")) c.trace_path = get_as<std::string>(j["trace_path"], "trace_path");
    if (has("mu")) c.mu = get_as<std::vector<double>>(j["mu"], "mu");
    if (has("points")) c.points = get_as<std::vector<std::string>>(j["points"], "points");
    if (has("K")) c.K = get_as<std::vector<double>>(j["K"], "K");
    if (has("c")) c.c = get_num(j["c"], "c");
    if (has("p_scan")) c.p_scan = get_as<std::vector<double>>(j["p_scan"], "p_scan");
    if (has("only")) c.only = get_as<std::vector<std::string>>(j["only"], "only");
    if (has("json_report")) c.json_report = get_as<bool>(j["json_report"], "json_report");
    if (has("output")) c.output = get_as<std::string>(j["output"], "output");
    if (has("format")) c.format = get_as<std::string>(j["format"], "format");
    if (has("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
    if (has("workers")) c.workers = get_as<int>(j["workers"], "workers");
    if (has("quadrature")) {
        const json& q = j["quadrature"];
        check_keys(q, {"mu_step", "mu_max_override", "mu_switch", "nystrom_nodes", "grid_points", "oracle_grid"},
                   "quadrature");
        if (q.contains("mu_step")) c.quad.mu_step = get_num(q["mu_step"], "mu_step");
        if (q.contains("mu_max_override")) c.quad.mu_max_override = get_num(q["mu_max_override"], "mu_max_override");
        if (q.contains("mu_switch")) c.quad.mu_switch = get_num(q["mu_switch"], "mu_switch");
        if (q.contains("nystrom_nodes")) c.quad.nystrom_nodes = get_as<int>(q["nystrom_nodes"], "nystrom_nodes");
        if (q.contains("grid_points")) c.quad.grid_points = get_as<int>(q["grid_points"], "grid_points");
        if (q.contains("oracle_grid")) c.quad.oracle_grid = get_as<int>(q["oracle_grid"], "oracle_grid");
    }
    if (has("tolerances")) {
        const json& t = j["tolerances"];
        check_keys(t, {"tail_tol", "tol_cert", "prune", "merge", "max_outer"}, "tolerances");
        if (t.contains("tail_tol")) c.tol.tail_tol = get_num(t["tail_tol"], "tail_tol");
        if (t.contains("tol_cert")) c.tol.tol_cert = get_num(t["tol_cert"], "tol_cert");
        if (t.contains("prune")) c.tol.prune = get_num(t["prune"], "prune");
        if (t.contains("merge")) c.tol.merge = get_num(t["merge"], "merge");
        if (t.contains("max_outer")) c.tol.max_outer = get_as<int>(t["max_outer"], "max_outer");
    }
    return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path + ": " + e.what());
    }
    return config_from_json(j, std::move(base));
}

std::pair<double, double> parse_range(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError("range '" + s + "' must look like lo:hi");
    std::vector<double> lo = parse_list(s.substr(0, colon));
    std::vector<double> hi = parse_list(s.substr(colon + 1));
    if (lo.size() != 1 || hi.size() != 1) throw ConfigError("range '" + s + "' must look like lo:hi");
    if (!(lo[0] > 0.0 && hi[0] > lo[0] && std::isfinite(hi[0])))
        throw ConfigError("range '" + s + "' needs 0 < lo < hi");
    return {lo[0], hi[0]};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("not a number: '" + item + "'");
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size()) throw ConfigError("not a number: '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

}  // namespace cmx::cli
