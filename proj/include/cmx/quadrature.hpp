#pragma once

#include <vector>

namespace cmx::quad {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule on [a, b], nodes increasing.
Rule gauss_legendre(int n, double a = 0.0, double b = 1.0);

// Gauss-Legendre in s = -ln x over [0, s_max], mapped to x in (0,1); nodes increasing.
Rule log_gauss_legendre(int n, double s_max);

// Composite Simpson weights for n_intervals (even) steps of size h.
std::vector<double> simpson_weights(int n_intervals, double h);

std::vector<double> logspace(double lo, double hi, int n);

}  // namespace cmx::quad
