#include "cmx/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <boost/math/special_functions/legendre.hpp>

#include "cmx/errors.hpp"

namespace cmx::quad {

Rule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    std::vector<double> zeros = boost::math::legendre_p_zeros<double>(n);
    std::vector<std::pair<double, double>> ref;  // nodes and weights on [-1, 1]
    for (double x : zeros) {
        double dp = boost::math::legendre_p_prime<double>(n, x);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        ref.push_back({x, w});
        if (x != 0.0) ref.push_back({-x, w});
    }
    std::sort(ref.begin(), ref.end());
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    Rule r;
    for (auto [x, w] : ref) {
        r.x.push_back(c + h * x);
        r.w.push_back(h * w);
    }
    return r;
}

Rule log_gauss_legendre(int n, double s_max) {
    if (!(s_max > 0.0)) throw DomainError("log_gauss_legendre: s_max must be positive");
    Rule r = gauss_legendre(n, 0.0, s_max);
    Rule out;
    for (int i = n - 1; i >= 0; --i) {
        double x = std::exp(-r.x[i]);
        out.x.push_back(x);
        out.w.push_back(r.w[i] * x);
    }
    return out;
}

std::vector<double> simpson_weights(int n_intervals, double h) {
    if (n_intervals < 2 || n_intervals % 2 != 0)
        throw DomainError("simpson_weights: interval count must be even and >= 2");
    std::vector<double> w(n_intervals + 1);
    for (int i = 0; i <= n_intervals; ++i) {
        double c = (i == 0 || i == n_intervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        w[i] = c * h / 3.0;
    }
    return w;
}

std::vector<double> logspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < n; ++i) v[i] = std::exp(a + (b - a) * i / (n - 1));
    v.front() = lo;
    v.back() = hi;
    return v;
}

}  // namespace cmx::quad
