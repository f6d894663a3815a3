#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cmx/cmf.hpp"
#include "cmx/operator_k.hpp"
#include "cmx/special_fn.hpp"
#include "test_support.hpp"

using namespace cmx::opk;
using cplx = std::complex<double>;

namespace {

UnitGridFunction ones(int n = 200) {
    return UnitGridFunction::gauss_legendre(n, [](double) { return 1.0; });
}

UnitGridFunction log_grid(const std::function<double(double)>& f) {
    return UnitGridFunction::log_gauss_legendre(200, 60.0, f);
}

}  // namespace

TEST_CASE("grid weights integrate constants") {
    for (int n : {20, 200, 400}) {
        auto f = ones(n);
        CHECK(std::abs(std::accumulate(f.weights.begin(), f.weights.end(), 0.0) - 1.0) < 1e-12);
        CHECK(std::is_sorted(f.nodes.begin(), f.nodes.end()));
    }
    auto g = log_grid([](double) { return 1.0; });
    CHECK(std::abs(std::accumulate(g.weights.begin(), g.weights.end(), 0.0) - 1.0) < 1e-12);
    UnitGridFunction bad = ones(10);
    bad.weights[3] = -1.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("K of the constant function") {
    auto f = ones();
    CHECK(std::abs(apply_K(f, 1.0) - std::log(2.0)) < 1e-10);
    CHECK(std::abs(apply_K(f, 3.0) - std::log(4.0 / 3.0)) < 1e-10);
    cplx z(1.0, 1.0);
    CHECK(std::abs(apply_K(f, z) - std::log((z + 1.0) / z)) < 1e-10);
}

TEST_CASE("K reproduces the eigenvalue at interior points") {
    double nu = cmx::special::eigenvalue_nu(1.0);
    auto u = log_grid([](double x) { return cmx::special::eigfun_u(x, 1.0); });
    for (double x : {0.3, 0.7}) CHECK(rel_err(apply_K(u, x), nu * cmx::special::eigfun_u(x, 1.0)) < 1e-6);
}

TEST_CASE("eigen-relation residual on 200 nodes") {
    for (double mu : {0.5, 1.0, 2.0, 5.0}) {
        CAPTURE(mu);
        CHECK(eigen_relation_residual(mu, 200) <= 1e-6);
    }
}

TEST_CASE("finite Laplace transform") {
    auto f = ones();
    CHECK(std::abs(apply_Lambda(f, 0.0) - 1.0) < 1e-14);
    CHECK(std::abs(apply_Lambda(f, 2.0) - (1.0 - std::exp(-2.0)) / 2.0) < 1e-13);
    auto e = UnitGridFunction::gauss_legendre(200, [](double x) { return std::exp(-x); });
    CHECK(std::abs(apply_Lambda(e, 1.0) - (1.0 - std::exp(-2.0)) / 2.0) < 1e-13);
}

TEST_CASE("K and Lambda are linear") {
    auto g = test_rng(11);
    std::uniform_real_distribution<double> d(-2.0, 2.0), xd(0.01, 5.0);
    auto f1 = UnitGridFunction::gauss_legendre(100, [](double x) { return std::sin(3 * x); });
    auto f2 = UnitGridFunction::gauss_legendre(100, [](double x) { return 1.0 / (1.5 + x); });
    for (int k = 0; k < 50; ++k) {
        double a = d(g), b = d(g), x = xd(g);
        UnitGridFunction h = f1;
        for (std::size_t i = 0; i < h.size(); ++i) h.values[i] = a * f1.values[i] + b * f2.values[i];
        double lhs = apply_K(h, x), rhs = a * apply_K(f1, x) + b * apply_K(f2, x);
        CHECK(std::abs(lhs - rhs) <= 1e-14 * (std::abs(a) + std::abs(b)) * 4.0);
        lhs = apply_Lambda(h, x);
        rhs = a * apply_Lambda(f1, x) + b * apply_Lambda(f2, x);
        CHECK(std::abs(lhs - rhs) <= 1e-14 * (std::abs(a) + std::abs(b)) * 4.0);
    }
}

TEST_CASE("Gram form is symmetric") {
    auto g = test_rng(12);
    std::uniform_real_distribution<double> t(0.0, 8.0);
    for (int k = 0; k < 20; ++k) {
        double s1 = t(g), s2 = t(g);
        auto f = UnitGridFunction::gauss_legendre(200, [&](double x) { return std::exp(-s1 * x); });
        auto h = UnitGridFunction::gauss_legendre(200, [&](double x) { return std::cos(s2 * x); });
        CHECK(std::abs(gram_form(f, h) - gram_form(h, f)) <= 1e-12 * std::abs(gram_form(f, h)) + 1e-15);
    }
}

TEST_CASE("u-transform of zero") {
    auto z = log_grid([](double) { return 0.0; });
    UTransform tf = u_forward(z);
    for (double c : tf.coefficients) CHECK(c == 0.0);
    CHECK(u_inverse(tf, 0.4) == 0.0);
}

TEST_CASE("u-transform roundtrip and Plancherel") {
    auto f = log_grid([](double x) { return std::exp(-x); });
    UTransform tf = u_forward(f);
    auto gl = cmx::quad::gauss_legendre(40, 0.0, 1.0);
    double worst = 0.0;
    for (double x : gl.x) worst = std::max(worst, std::abs(u_inverse(tf, x) - std::exp(-x)));
    CHECK(worst <= 1e-4);

    // at x = 1 the inverse is the plain weighted sum of the coefficients
    double s = 0.0;
    for (std::size_t k = 0; k < tf.coefficients.size(); ++k) {
        double mu = tf.grid.mu[k];
        s += tf.grid.weights[k] * tf.coefficients[k] * mu * std::tanh(std::numbers::pi * mu);
    }
    CHECK(std::abs(u_inverse(tf, 1.0) - s) < 1e-13);

    auto r = log_grid([](double x) { return 1.0 / (2.0 + x); });
    CHECK(std::abs(plancherel_sum(u_forward(r)) - 1.0 / 6.0) < 1e-5);
}

TEST_CASE("Plancherel on random exponential sums") {
    auto g = test_rng(13);
    std::uniform_real_distribution<double> t(0.0, 6.0), a(0.1, 1.0);
    std::uniform_int_distribution<int> n(1, 4);
    for (int k = 0; k < 6; ++k) {
        std::vector<std::pair<double, double>> terms;
        int m = n(g);
        for (int j = 0; j < m; ++j) terms.push_back({t(g), a(g)});
        auto f = log_grid([&](double x) {
            double s = 0.0;
            for (auto [tj, aj] : terms) s += aj * std::exp(-tj * x);
            return s;
        });
        double exact = 0.0;
        for (auto [ti, ai] : terms)
            for (auto [tj, aj] : terms) exact += ai * aj * cmx::gram_g(ti + tj);
        CHECK(rel_err(plancherel_sum(u_forward(f)), exact) < 1e-5);
    }
}

TEST_CASE("commuting differential operator") {
    std::vector<double> probes = {0.1, 0.3, 0.5, 0.7, 0.9};
    CHECK(diffop_L_residual(1.0, probes) <= 1e-5);
    CHECK(diffop_L_residual(5.0, probes) <= 1e-4);
    CHECK(diffop_L_residual(1e-9, probes) <= 1e-5);
}
