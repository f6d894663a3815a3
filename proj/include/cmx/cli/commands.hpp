#pragma once

#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include "cmx/cli/config.hpp"

namespace cmx::cli {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_solver = 2, exit_verify = 3 };

// Tables and reports go to out (or the configured output file), diagnostics to err.
int run(const RunConfig& c, std::ostream& out, std::ostream& err);

int cmd_powerlaw(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_delta_star(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_local(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_eig(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_oracle_compare(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_demo_left(const RunConfig& c, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err);

// Command-line front end: flags override an optional --config file.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

// "0.5", "2+1i", "2-0.5i", "3i"
std::complex<double> parse_point(const std::string& s);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
};

// CSV with 12 significant digits, or a JSON array of row objects.
void write_table(const Table& t, const std::string& format, std::ostream& out);
std::string format_number(double v);

}  // namespace cmx::cli
