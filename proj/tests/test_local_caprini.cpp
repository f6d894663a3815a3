#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include <Eigen/Dense>

#include "cmx/errors.hpp"
#include "cmx/local_caprini.hpp"
#include "cmx/quadrature.hpp"
#include "test_support.hpp"

using namespace cmx;
using namespace cmx::local;
constexpr double e_ = std::numbers::e;

namespace {

CmfMeasure random_measure(std::mt19937_64& g, int max_atoms) {
    std::uniform_real_distribution<double> lt(-1.0, 1.0), a(0.1, 1.0);
    std::uniform_int_distribution<int> n(1, max_atoms);
    std::vector<Atom> atoms;
    int m = n(g);
    for (int j = 0; j < m; ++j) atoms.push_back({std::pow(10.0, lt(g)), a(g)});
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.t < y.t; });
    return CmfMeasure(atoms);
}

void check_certificate(const CapriniState& st) {
    CHECK(st.converged);
    CHECK(st.constraint_residual() <= 1e-10);
    CHECK(st.certificate_grid_min(10000) >= -1e-8 * st.f0.l2_norm_sq);
    CHECK(st.atom_residual() <= 1e-8);
    CHECK(std::abs(st.m - st.multiplier_from_identity()) <= 1e-9 * std::max(1.0, std::abs(st.m)));
    for (const auto& a : st.support.atoms()) CHECK(a.a > 0.0);
}

// Slope of the local envelope from the tangent cone of e^{-x}: a >= 0 on e^{-xt} (plus side only)
// and free coefficients on e^{-x}, x e^{-x}.
double tangent_cone_slope(double x0, bool plus) {
    auto rule = quad::gauss_legendre(200, 0.0, 1.0);
    auto best_for = [&](std::vector<std::function<double(double)>> basis) {
        int n = static_cast<int>(basis.size());
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) {
            v[i] = basis[i](x0);
            for (int j = 0; j < n; ++j)
                for (std::size_t q = 0; q < rule.x.size(); ++q) G(i, j) += rule.w[q] * basis[i](rule.x[q]) * basis[j](rule.x[q]);
        }
        Eigen::VectorXd c = G.ldlt().solve(v);
        return std::pair{v.dot(c), c};
    };
    std::function<double(double)> e0 = [](double x) { return std::exp(-x); };
    std::function<double(double)> e1 = [](double x) { return x * std::exp(-x); };
    double base = best_for({e0, e1}).first;
    if (!plus) return std::sqrt(base);
    double best = base;
    for (int k = 0; k <= 3000; ++k) {
        double t = 0.01 * k;
        if (std::abs(t - 1.0) < 0.05) continue;
        std::function<double(double)> et = [t](double x) { return std::exp(-x * t); };
        auto [q, c] = best_for({et, e0, e1});
        if (c[0] >= 0.0) best = std::max(best, q);
    }
    return std::sqrt(best);
}

}  // namespace

TEST_CASE("Caprini function closed forms") {
    CapriniState same = solve_local(ReferenceF0::exponential(), 2.0, 0.0);
    for (double t : {0.0, 0.5, 3.0, 40.0}) CHECK(std::abs(caprini_C(same, t)) <= 1e-16);
    CHECK(same.residual_l2 == 0.0);

    CapriniState st;
    st.f0 = ReferenceF0::from_measure(CmfMeasure({{3.0, 0.5}}));
    st.x0 = 2.0;
    st.support = CmfMeasure({{1.0, 1.0}, {3.0, 0.5}});
    CHECK(caprini_C(st, 0.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(caprini_C(st, 2.0) == doctest::Approx(gram_g(3.0)).epsilon(1e-14));
}

TEST_CASE("identity at delta = 0") {
    CapriniState st = solve_local(ReferenceF0::from_measure(CmfMeasure({{0.5, 1.0}, {4.0, 2.0}})), 1.5, 0.0);
    CHECK(st.converged);
    CHECK(st.residual_l2 == 0.0);
    CHECK(st.m == 0.0);
    CHECK(std::abs(st.certificate_grid_min(10000)) <= 1e-15);
}

TEST_CASE("infeasible offsets are rejected") {
    CHECK_THROWS_AS(solve_local(ReferenceF0::exponential(), 2.0, -std::exp(-2.0)), DomainError);
    CHECK_THROWS_AS(solve_local(ReferenceF0::exponential(), 0.5, 1e-3), DomainError);
    CHECK_THROWS_AS(exp_closed_form(2.0, -0.2), DomainError);
}

TEST_CASE("support structure for e^{-x}") {
    auto f0 = ReferenceF0::exponential();
    for (double delta : {1e-3, 0.05, 0.5}) {
        CapriniState st = solve_local(f0, 2.0, delta);
        check_certificate(st);
        REQUIRE(st.support.size() == 2);
        CHECK(st.support.atoms()[0].t == 0.0);
        CHECK(st.support.atoms()[1].t > 1.0);
        CHECK(caprini_C(st, 0.0) == doctest::Approx(st.m).epsilon(1e-9));
    }
    for (double delta : {-1e-3, -0.05, -0.13}) {
        CapriniState st = solve_local(f0, 2.0, delta);
        check_certificate(st);
        REQUIRE(st.support.size() == 1);
        CHECK(st.support.atoms()[0].t > 1.0);
    }
}

TEST_CASE("iterative and closed-form solutions coincide") {
    auto f0 = ReferenceF0::exponential();
    for (double x0 : {1.0, 2.0, 5.0, 10.0})
        for (double delta : {1e-3, -1e-5, 0.1}) {
            if (!(delta > -std::exp(-x0))) continue;
            CAPTURE(x0);
            CAPTURE(delta);
            CapriniState it = solve_local(f0, x0, delta);
            CapriniState cf = exp_closed_form(x0, delta);
            check_certificate(cf);
            REQUIRE(it.support.size() == cf.support.size());
            for (std::size_t j = 0; j < it.support.size(); ++j) {
                CHECK(std::abs(it.support.atoms()[j].t - cf.support.atoms()[j].t) <= 1e-6);
                CHECK(std::abs(it.support.atoms()[j].a - cf.support.atoms()[j].a) <= 1e-6);
            }
            CHECK(rel_err(it.residual_l2, cf.residual_l2) <= 1e-8);
        }
}

TEST_CASE("certificates for random reference measures") {
    auto g = test_rng(31);
    std::uniform_real_distribution<double> x0d(1.0, 4.0), dd(-0.9, 1.0);
    for (int k = 0; k < 12; ++k) {
        CmfMeasure m = random_measure(g, 4);
        auto f0 = ReferenceF0::from_measure(m);
        double x0 = x0d(g);
        double delta = dd(g) * 0.2 * m(x0);
        CAPTURE(k);
        CAPTURE(x0);
        CAPTURE(delta);
        CapriniState st = solve_local(f0, x0, delta);
        check_certificate(st);
        CHECK(st.support.size() <= 10);
        for (std::size_t j = 1; j < st.history.size(); ++j)
            CHECK(st.history[j].residual_l2 <= st.history[j - 1].residual_l2 * (1.0 + 1e-12));
    }
}

TEST_CASE("star norm is below the L2 norm") {
    auto g = test_rng(32);
    for (int k = 0; k < 100; ++k) {
        CmfMeasure m = random_measure(g, 6);
        CHECK(m.star_norm() <= m.l2_norm());
        auto rule = quad::gauss_legendre(100, 0.0, 1.0);
        double s = 0.0;
        for (std::size_t q = 0; q < rule.x.size(); ++q) s += rule.w[q] * m(rule.x[q]) * m(rule.x[q]);
        CHECK(rel_err(m.l2_norm_sq(), s) <= 1e-12);
    }
}

TEST_CASE("envelope for e^{-x} at x0 = 2, eps = 0.01") {
    SweepResult sw = sweep_epsilon(ReferenceF0::exponential(), 2.0, 0.01);
    CHECK(sw.m_eps < std::exp(-2.0));
    CHECK(sw.M_eps > std::exp(-2.0));
    CHECK(rel_err(sw.plus.residual_l2, 0.01) <= 1e-8);
    CHECK(rel_err(sw.minus.residual_l2, 0.01) <= 1e-8);
    check_certificate(sw.plus);
    check_certificate(sw.minus);
    // the offset found for eps reproduces eps
    CHECK(rel_err(solve_local(ReferenceF0::exponential(), 2.0, sw.delta_plus).residual_l2, 0.01) <= 1e-8);
}

TEST_CASE("sweep rejects unreachable eps on the lower side") {
    auto f0 = ReferenceF0::exponential();
    CHECK_THROWS_AS(sweep_epsilon(f0, 2.0, 2.0 * f0.l2_norm()), BracketError);
}

TEST_CASE("envelope slope tends to E+") {
    double eps = 1e-5;
    SweepResult sw = sweep_epsilon(ReferenceF0::exponential(), 2.0, eps);
    ESlopes e = e_slopes(2.0);
    CHECK(rel_err((sw.M_eps - std::exp(-2.0)) / eps, e.E_plus) <= 1e-3);
    CHECK(rel_err((std::exp(-2.0) - sw.m_eps) / eps, e.E_minus) <= 1e-3);
}

TEST_CASE("E+ and E- at x0 = 1") {
    ESlopes e = e_slopes(1.0);
    CHECK(std::abs(e.E_plus - 2.67788263) <= 1e-4);
    double plus_exact = std::sqrt(-(std::pow(e_, 4) - 8 * std::pow(e_, 3) + 14 * e_ * e_ + 8 * e_ - 19) /
                                  ((e_ * e_ - 2 * e_ - 1) * (3 * e_ * e_ - 10 * e_ + 5)));
    CHECK(std::abs(e.E_plus - plus_exact) <= 1e-7);
    double minus_exact = 2.0 * std::sqrt((e_ * e_ - 1.0) / (std::pow(e_, 4) - 6 * e_ * e_ + 1.0));
    CHECK(std::abs(e.E_minus - minus_exact) <= 1e-7);
}

TEST_CASE("E+ and E- from the tangent cone") {
    for (double x0 : {1.0, 2.0, 5.0}) {
        CAPTURE(x0);
        ESlopes e = e_slopes(x0);
        CHECK(rel_err(e.E_plus, tangent_cone_slope(x0, true)) <= 1e-6);
        CHECK(rel_err(e.E_minus, tangent_cone_slope(x0, false)) <= 1e-6);
    }
}

TEST_CASE("E+ at large x0") {
    double limit = std::sqrt(-(e_ * e_ + 2 * e_ - 1) / (3 * e_ * e_ - 10 * e_ + 5));
    CHECK(limit == doctest::Approx(27.488747597).epsilon(1e-9));
    CHECK(std::abs(e_slopes(50.0).E_plus / 27.488747597 - 1.0) <= 0.01);
}

TEST_CASE("E- maximum and scaled growth") {
    double peak = (e_ + 2.0) / (e_ + 1.0);
    double at_peak = e_slopes(peak).E_minus;
    CHECK(std::abs(at_peak / 1.566 - 1.0) <= 0.01);
    for (double x : {1.0, 1.1, 1.2, 1.35, 1.5, 2.0}) CHECK(e_slopes(x).E_minus <= at_peak);
    double prev = 0.0;
    for (double x0 : {1.0, 2.0, 5.0, 10.0, 25.0, 50.0}) {
        double s = std::exp(x0) / x0 * e_slopes(x0).E_minus;
        CHECK(s > prev);
        prev = s;
    }
    CHECK(std::abs(prev / 5.8 - 1.0) <= 0.02);
}
