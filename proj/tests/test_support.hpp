#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>

// CMX_SEED overrides the fixed default seed of the property tests.
inline std::uint64_t test_seed() {
    if (const char* s = std::getenv("CMX_SEED")) return std::strtoull(s, nullptr, 10);
    return 20211;
}

inline std::mt19937_64 test_rng(std::uint64_t salt = 0) { return std::mt19937_64(test_seed() + salt); }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }
