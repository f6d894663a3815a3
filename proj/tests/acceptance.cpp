#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "cmx/acceptance.hpp"

// Usage: acceptance [check-name ...]
int main(int argc, char** argv) {
    std::vector<std::string> only(argv + 1, argv + argc);
    cmx::acceptance::Options opt;
    if (const char* s = std::getenv("CMX_SEED")) opt.seed = std::strtoull(s, nullptr, 10);
    int failed = 0, total = 0;
    for (const auto& name : cmx::acceptance::check_names()) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
        auto o = cmx::acceptance::run_check(name, opt);
        std::cout << cmx::acceptance::format_line(o) << std::endl;
        ++total;
        if (!o.pass) ++failed;
    }
    std::cout << (total - failed) << "/" << total << " criteria passed" << std::endl;
    return failed ? 1 : 0;
}
