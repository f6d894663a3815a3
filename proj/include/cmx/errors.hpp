#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cmx {

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Carries the achieved relative error estimate.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate)
        : std::runtime_error(what), estimate(estimate) {}
    double estimate;
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Root or bisection failure; trace holds the scanned (x, f(x)) pairs.
class BracketError : public std::runtime_error {
public:
    BracketError(const std::string& what, std::vector<std::pair<double, double>> trace = {})
        : std::runtime_error(what), trace(std::move(trace)) {}
    std::vector<std::pair<double, double>> trace;
};

class ConditioningError : public std::runtime_error {
public:
    ConditioningError(const std::string& what, double condition)
        : std::runtime_error(what), condition(condition) {}
    double condition;
};

}  // namespace cmx
