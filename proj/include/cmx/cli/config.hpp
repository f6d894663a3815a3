#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cmx::cli {

enum class Command { powerlaw, delta_star, local, eig, oracle_compare, demo_left, verify };

std::string command_name(Command c);
Command command_from_name(const std::string& s);

struct QuadratureProfile {
    double mu_step = 0.02;
    double mu_max_override = 0.0;  // 0 selects the tail rule
    double mu_switch = std::numeric_limits<double>::infinity();
    int nystrom_nodes = 400;
    int grid_points = 2000;  // certificate search grid of the local solver
    int oracle_grid = 2000;  // t-grid of the NNLS oracle
    bool operator==(const QuadratureProfile&) const = default;
};

struct Tolerances {
    double tail_tol = 1e-8;
    double tol_cert = 1e-10;  // relative to ||f0||_2^2
    double prune = 1e-12;
    double merge = 1e-6;
    int max_outer = 200;
    bool operator==(const Tolerances&) const = default;
};

struct RunConfig {
    Command command = Command::powerlaw;
    double x0 = 2.0;
    std::vector<double> x0_list;  // oracle-compare; empty means {x0}

    // eps range in decades, or explicit values
    double eps_lo = 1e-9;
    double eps_hi = 1e-5;
    int per_decade = 2;
    std::vector<double> eps;
    std::vector<double> veps;

    std::string f0 = "exp";  // "exp" or "t:a,t:a,..."
    std::optional<double> delta;
    bool slopes = false;
    int trace_points = 400;
    std::string trace_path;

    std::vector<double> mu;
    std::vector<std::string> points;  // "0.5", "2+1i"

    std::vector<double> K;
    double c = 0.0;
    std::vector<double> p_scan;

    std::vector<std::string> only;
    bool json_report = false;

    std::string output;  // empty for standard output
    std::string format = "csv";
    std::uint64_t seed = 20211;
    int workers = 1;

    QuadratureProfile quad;
    Tolerances tol;

    bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const RunConfig& c);
// Missing keys keep their defaults; unknown keys and bad types throw ConfigError.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// "lo:hi" with lo < hi, both positive.
std::pair<double, double> parse_range(const std::string& s);
std::vector<double> parse_list(const std::string& s);

}  // namespace cmx::cli
