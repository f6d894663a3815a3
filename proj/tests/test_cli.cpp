#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "cmx/cli/commands.hpp"
#include "cmx/cli/config.hpp"
#include "cmx/special_fn.hpp"

using namespace cmx::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "cmx");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

int column(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == name) return static_cast<int>(k);
    FAIL("missing column " << name);
    return -1;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("cmx_test_" + name); }

}  // namespace

TEST_CASE("powerlaw at x0 = 2") {
    Run r = invoke({"powerlaw", "--x0", "2", "--eps-decades", "1e-9:1e-5"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 10);
    CHECK(rows[0] == std::vector<std::string>{"eps", "veps", "delta_star", "asymptotic", "ratio", "local_slope"});
    // least-squares slope recomputed from the printed table
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        double x = std::log(std::stod(rows[k][0])), y = std::log(std::stod(rows[k][2]));
        sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(std::abs(slope - 1.0 / 3.0) <= 0.01);
    CHECK(r.err.find("fitted slope") != std::string::npos);
}

TEST_CASE("powerlaw at x0 = 1 compares with (sqrt 2/pi) eps |ln eps|") {
    Run r = invoke({"powerlaw", "--x0", "1"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    int ce = column(rows[0], "eps"), ca = column(rows[0], "asymptotic");
    for (std::size_t k = 1; k < rows.size(); ++k) {
        double eps = std::stod(rows[k][ce]);
        double expect = std::numbers::sqrt2 / std::numbers::pi * eps * std::abs(std::log(eps));
        CHECK(std::stod(rows[k][ca]) == doctest::Approx(expect).epsilon(1e-11));
    }
}

TEST_CASE("malformed input gives exit code 1 and usage") {
    for (auto args : std::vector<std::vector<std::string>>{
             {"powerlaw", "--eps-decades", "1e-5:1e-9"},
             {"powerlaw", "--eps-decades", "abc"},
             {"powerlaw", "--eps-decades", "1e-9"},
             {"powerlaw", "--bogus"},
             {"delta-star", "--eps", "1e-3,x"},
             {},
         }) {
        Run r = invoke(args);
        CHECK(r.code == 1);
        CHECK(!r.err.empty());
    }
    Run r = invoke({"powerlaw", "--eps-decades", "1e-5:1e-9"});
    CHECK(r.err.find("Usage") != std::string::npos);
    CHECK(invoke({"delta-star", "--x0", "0.5", "--eps", "1e-3"}).code == 1);
}

TEST_CASE("CSV numbers carry 12 significant digits") {
    Run r = invoke({"delta-star", "--x0", "2", "--eps", "1e-3"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    for (const auto& cell : rows[1]) {
        std::string mant = cell.substr(0, cell.find_first_of("eE"));
        int digits = 0;
        bool lead = true;
        for (char ch : mant) {
            if (!std::isdigit(static_cast<unsigned char>(ch))) continue;
            if (lead && ch == '0') continue;
            lead = false;
            ++digits;
        }
        CHECK(digits <= 12);
    }
    CHECK(format_number(std::numbers::pi) == "3.14159265359");
}

TEST_CASE("local envelope with certificate trace") {
    fs::path trace = temp_file("trace.csv");
    Run r = invoke({"local", "--f0", "exp", "--x0", "2", "--eps", "0.01", "--trace", trace.string()});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    double f0x = std::exp(-2.0);
    CHECK(j["M_eps"].get<double>() > f0x);
    CHECK(j["m_eps"].get<double>() < f0x);
    for (const char* side : {"plus", "minus"}) {
        CHECK(j[side]["converged"].get<bool>());
        CHECK(j[side]["certificate_min"].get<double>() >= -1e-8);
        CHECK(j[side]["violations"].empty());
        CHECK(j[side]["residual_l2"].get<double>() == doctest::Approx(0.01).epsilon(1e-8));
    }
    std::ifstream in(trace);
    std::stringstream buf;
    buf << in.rdbuf();
    auto rows = parse_csv(buf.str());
    CHECK(rows[0] == std::vector<std::string>{"t", "C_hat_plus", "C_hat_minus"});
    CHECK(rows.size() == 401);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(std::stod(rows[k][1]) >= -1e-8);
        CHECK(std::stod(rows[k][2]) >= -1e-8);
    }
    fs::remove(trace);
}

TEST_CASE("local slopes at x0 = 1") {
    Run r = invoke({"local", "--f0", "exp", "--x0", "1", "--slopes"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(std::abs(j["E_plus"].get<double>() - 2.67788263) <= 1e-4);
    CHECK(invoke({"local", "--f0", "0.5:1", "--slopes"}).code == 1);
}

TEST_CASE("local at delta = 0 is the identity") {
    Run r = invoke({"local", "--f0", "1:1", "--x0", "2", "--delta", "0"});
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j["state"]["residual_l2"].get<double>() == 0.0);
    CHECK(j["state"]["violations"].empty());
    CHECK(j["state"]["atoms"].size() == 1);
}

TEST_CASE("solver failures give exit code 2") {
    Run r = invoke({"local", "--f0", "exp", "--x0", "2", "--eps", "5"});
    CHECK(r.code == 2);
    CHECK(r.err.find("supremum") != std::string::npos);
}

TEST_CASE("eig table") {
    Run r = invoke({"eig", "--mu", "1,2", "--point", "1", "--point", "2+1i", "--point", "0.5"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 7);
    int cu = column(rows[0], "re_u"), cm = column(rows[0], "method");
    CHECK(rows[1][cu] == "1");
    CHECK(rows[1][cm] == "exact");
    CHECK(rows[3][cm] == "euler");
    CHECK(std::stod(rows[3][cu]) == doctest::Approx(0.632223345071).epsilon(1e-9));
    CHECK(parse_point("2-0.5i") == std::complex<double>(2.0, -0.5));
    CHECK(parse_point("3i") == std::complex<double>(0.0, 3.0));
    CHECK(parse_point("1e-3+2e1i") == std::complex<double>(1e-3, 20.0));
    CHECK_THROWS(parse_point("2+xi"));
}

TEST_CASE("oracle comparison and dual scan") {
    Run r = invoke({"oracle-compare", "--x0", "1,2", "--veps", "1e-2,1e-3"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 5);
    int cp = column(rows[0], "rel_psi"), cl = column(rows[0], "rel_l2");
    for (std::size_t k = 1; k < rows.size(); ++k) {
        CHECK(std::abs(std::stod(rows[k][cp])) <= 1e-4);
        CHECK(std::abs(std::stod(rows[k][cl])) <= 1e-4);
    }
    Run d = invoke({"oracle-compare", "--x0", "2", "--eps", "0.05", "--p", "1.5,3,6", "--format", "json"});
    REQUIRE(d.code == 0);
    json j = json::parse(d.out);
    REQUIRE(j.size() == 3);
    for (const auto& row : j) CHECK(row["excess"].get<double>() >= -1e-12);
}

TEST_CASE("demo-left") {
    Run r = invoke({"demo-left", "--eps", "0.01", "--K", "50,5000"});
    REQUIRE(r.code == 0);
    auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(std::stod(rows[1][2]) == doctest::Approx(0.1));
    CHECK(std::stod(rows[2][2]) == doctest::Approx(1.0));
    CHECK(invoke({"demo-left", "--c", "1"}).code == 1);
}

TEST_CASE("verify single check and JSON report") {
    Run r = invoke({"verify", "--only", "pythagoras"});
    CHECK(r.code == 0);
    CHECK(r.out.rfind("PASS", 0) == 0);
    CHECK(r.out.find("1/1 checks passed") != std::string::npos);
    Run j = invoke({"verify", "--only", "left-unbounded,norm-bridge", "--json"});
    CHECK(j.code == 0);
    json rep = json::parse(j.out);
    CHECK(rep["checks"].size() == 2);
    CHECK(rep["failed"].get<int>() == 0);
    CHECK(invoke({"verify", "--only", "nonsense"}).code == 1);
}

TEST_CASE("verify failure gives exit code 3") {
    Run r = invoke({"verify", "--only", "x0-one"});
    if (r.out.rfind("FAIL", 0) == 0) CHECK(r.code == 3);
    else CHECK(r.code == 0);
}

TEST_CASE("config defaults and round trip") {
    RunConfig c;
    CHECK(c.quad.mu_step == 0.02);
    CHECK(c.tol.tail_tol == 1e-8);
    CHECK(c.tol.tol_cert == 1e-10);
    CHECK(c.tol.max_outer == 200);
    CHECK(c.tol.prune == 1e-12);
    CHECK(c.tol.merge == 1e-6);
    CHECK(c.quad.grid_points == 2000);
    CHECK(c.quad.oracle_grid == 2000);
    CHECK(c.quad.nystrom_nodes == 400);
    CHECK(config_from_json(to_json(c)) == c);

    c.command = Command::local;
    c.x0 = 2.718281828459045;
    c.eps = {0.1 + 0.2, 1e-300};
    c.delta = -1.0 / 3.0;
    c.points = {"2+1i"};
    c.quad.mu_switch = 25.0;
    c.seed = 18446744073709551615ull;
    c.only = {"powerlaw"};
    RunConfig back = config_from_json(json::parse(to_json(c).dump()));
    CHECK(back == c);

    RunConfig inf;
    CHECK(std::isinf(config_from_json(json::parse(to_json(inf).dump())).quad.mu_switch));

    CHECK_THROWS_AS(config_from_json(json{{"x0", "two"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"nonsense", 1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"quadrature", {{"mu_stepp", 1}}}}), ConfigError);
}

TEST_CASE("config file seeds flags") {
    fs::path cfg = temp_file("config.json");
    {
        std::ofstream f(cfg);
        f << json{{"x0", 5.0}, {"eps", {1e-4}}, {"format", "json"}}.dump();
    }
    Run dump = invoke({"delta-star", "--config", cfg.string(), "--dump-config"});
    REQUIRE(dump.code == 0);
    json j = json::parse(dump.out);
    CHECK(j["x0"].get<double>() == 5.0);
    CHECK(j["command"] == "delta-star");
    Run over = invoke({"delta-star", "--config", cfg.string(), "--x0", "2", "--dump-config"});
    CHECK(json::parse(over.out)["x0"].get<double>() == 2.0);
    Run run = invoke({"delta-star", "--config", cfg.string()});
    REQUIRE(run.code == 0);
    json rows = json::parse(run.out);
    CHECK(rows.size() == 1);
    CHECK(rows[0]["eps"].get<double>() == doctest::Approx(1e-4).epsilon(1e-8));
    fs::remove(cfg);
    CHECK(invoke({"delta-star", "--config", "/nonexistent/cmx.json"}).code == 1);
}

TEST_CASE("output is deterministic") {
    Run a = invoke({"powerlaw", "--x0", "2", "--workers", "1"});
    Run b = invoke({"powerlaw", "--x0", "2", "--workers", "3"});
    CHECK(a.out == b.out);
}

TEST_CASE("binary exit codes") {
    const char* bin = std::getenv("CMX_BIN");
    if (!bin) return;
    auto status = [&](const std::string& args) {
        std::string cmd = std::string(bin) + " " + args + " > /dev/null 2>&1";
        int s = std::system(cmd.c_str());
        return WEXITSTATUS(s);
    };
    CHECK(status("demo-left") == 0);
    CHECK(status("powerlaw --eps-decades 1e-5:1e-9") == 1);
    CHECK(status("local --f0 exp --x0 2 --eps 5") == 2);
    CHECK(status("--help") == 0);
}
