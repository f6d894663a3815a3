#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cmx::acceptance {

struct Outcome {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
};

struct Options {
    std::uint64_t seed = 20211;
    int workers = 1;
};

// Check names in criterion order.
const std::vector<std::string>& check_names();

// Unknown names throw DomainError. A check that throws is reported as a failure.
Outcome run_check(const std::string& name, const Options& opt = {});
std::vector<Outcome> run_checks(const std::vector<std::string>& only, const Options& opt = {});

std::string format_line(const Outcome& o);

}  // namespace cmx::acceptance
