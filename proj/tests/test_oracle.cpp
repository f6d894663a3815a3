#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cmx/errors.hpp"
#include "cmx/oracle.hpp"
#include "cmx/phi_solver.hpp"
#include "test_support.hpp"

using namespace cmx;
using namespace cmx::oracle;

TEST_CASE("Nystrom system, extension and Pythagoras") {
    for (double x0 : {1.0, 2.0, 5.0})
        for (double e2 : {1e-4, 1e-6, 1e-8, 1e-10}) {
            CAPTURE(x0);
            CAPTURE(e2);
            NystromSolution s = nystrom_solve(x0, e2);
            CHECK(s.system_residual <= 1e-12);
            CHECK(s.pythagoras_residual() <= 1e-8);
            // the extension divides by eps2, so node values are reproduced to system accuracy / eps2
            for (std::size_t i : {std::size_t(0), std::size_t(57), s.grid.size() - 1})
                CHECK(e2 * std::abs(s.extend(s.grid.nodes[i]) - s.grid.values[i]) <= 1e-12);
            CHECK(e2 * std::abs(s.extend(x0) - s.psi_at_x0) <= 1e-12);
        }
}

TEST_CASE("Nystrom against the spectral solver") {
    phi::PhiSolution sp = phi::solve_psi(2.0, 1e-2);
    NystromSolution ny = nystrom_solve(2.0, 1e-4, 400);
    CHECK(rel_err(ny.psi_at_x0, sp.psi_at_x0) <= 1e-4);
    CHECK(rel_err(ny.norm_l2, sp.norm_l2) <= 1e-4);
    CHECK(rel_err(ny.norm_hardy, sp.norm_hardy) <= 1e-4);
}

TEST_CASE("Nystrom self-convergence") {
    for (double x0 : {1.0, 2.0}) {
        NystromSolution a = nystrom_solve(x0, 1e-4, 200), b = nystrom_solve(x0, 1e-4, 400);
        CHECK(rel_err(a.psi_at_x0, b.psi_at_x0) < 1e-6);
        CHECK(rel_err(a.norm_l2, b.norm_l2) < 1e-6);
    }
}

TEST_CASE("Nystrom refuses unresolved systems") {
    try {
        nystrom_solve(2.0, 1e-12);
        FAIL("expected ConditioningError");
    } catch (const ConditioningError& e) {
        CHECK(e.condition > 1e12);
    }
    CHECK_THROWS_AS(nystrom_solve(2.0, 1e-4, 20), DomainError);
    CHECK_THROWS_AS(nystrom_solve(0.5, 1e-4), DomainError);
}

TEST_CASE("matching eps") {
    for (double eps : {1e-4, 1e-3, 0.05, 0.3}) {
        NystromSolution s = nystrom_match_eps(2.0, eps);
        CHECK(rel_err(s.eps(), eps) <= 1e-10);
    }
}

TEST_CASE("grid oracle against the Caprini solver") {
    auto f0 = local::ReferenceF0::exponential();
    auto grid = default_t_grid(2.0, 2000);
    CHECK(grid.size() == 2000);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == doctest::Approx(70.0));
    for (double delta : {1e-3, -1e-3}) {
        CAPTURE(delta);
        local::CapriniState st = local::solve_local(f0, 2.0, delta);
        GridLocalResult g = grid_local_solve(f0, 2.0, delta, grid);
        CHECK(std::abs(g.constraint_error) <= 1e-12);
        CHECK(g.residual_l2 >= st.residual_l2 * (1.0 - 1e-12));
        CHECK(g.residual_l2 / st.residual_l2 - 1.0 <= 1e-3);
        for (const auto& a : g.measure.atoms()) {
            double d = 1e9;
            for (const auto& b : st.support.atoms()) d = std::min(d, std::abs(a.t - b.t));
            CHECK(d <= 0.02);
        }
    }
}

TEST_CASE("grid oracle refines toward the optimum") {
    auto f0 = local::ReferenceF0::exponential();
    local::CapriniState st = local::solve_local(f0, 2.0, 1e-3);
    double coarse = grid_local_solve(f0, 2.0, 1e-3, default_t_grid(2.0, 200)).residual_l2;
    double fine = grid_local_solve(f0, 2.0, 1e-3, default_t_grid(2.0, 2000)).residual_l2;
    CHECK(fine <= coarse);
    CHECK(fine - st.residual_l2 < coarse - st.residual_l2);
}

TEST_CASE("grid oracle at delta = 0 reproduces f0") {
    auto f0 = local::ReferenceF0::from_measure(CmfMeasure({{0.5, 0.3}, {2.0, 0.7}}));
    GridLocalResult g = grid_local_solve(f0, 1.5, 0.0, {0.0, 0.25, 0.5, 1.0, 2.0, 4.0});
    CHECK(g.residual_l2 <= 1e-9);
    double w05 = 0.0, w2 = 0.0;
    for (const auto& a : g.measure.atoms()) {
        if (a.t == 0.5) w05 = a.a;
        if (a.t == 2.0) w2 = a.a;
    }
    CHECK(w05 == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(w2 == doctest::Approx(0.7).epsilon(1e-6));
    CHECK_THROWS_AS(grid_local_solve(f0, 1.5, -10.0, {0.0, 1.0}), DomainError);
}

TEST_CASE("dual bound") {
    const std::vector<double> p_scan = {1.1, 1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0, 20.0};
    for (double x0 : {1.0, 2.0, 5.0})
        for (double eps : {1e-3, 0.05}) {
            CAPTURE(x0);
            CAPTURE(eps);
            NystromSolution m = nystrom_match_eps(x0, eps);
            double dstar = m.delta_star();
            DualBound d = dual_upper_bound(x0, eps, p_scan);
            for (const auto& q : d.scan) CHECK(q.bound >= dstar * (1.0 - 1e-12));
            double p_star = m.psi_at_x0 / (m.norm_l2 * m.norm_l2);
            CHECK(p_star > 1.0);
            CHECK(rel_err(dual_bound_at(x0, eps, p_star), dstar) <= 1e-6);
            auto hi = std::upper_bound(p_scan.begin(), p_scan.end(), p_star);
            REQUIRE(hi != p_scan.begin());
            REQUIRE(hi != p_scan.end());
            CHECK((d.p_best == *hi || d.p_best == *(hi - 1)));
        }
    CHECK_THROWS_AS(dual_bound_at(2.0, 0.05, 1.0), DomainError);
}

TEST_CASE("left extrapolation is unbounded") {
    auto rows = left_unbounded_demo(0.01, {50.0, 5000.0});
    CHECK(rows[0].l2_discrepancy == doctest::Approx(0.01 * std::sqrt(-std::expm1(-100.0))).epsilon(1e-15));
    CHECK(rows[0].gap == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(rows[1].gap == doctest::Approx(1.0).epsilon(1e-14));
    auto g = test_rng(41);
    std::uniform_real_distribution<double> lk(-2.0, 3.0);
    std::vector<double> K;
    for (int k = 0; k < 100; ++k) K.push_back(std::pow(10.0, lk(g)));
    std::sort(K.begin(), K.end());
    auto r = left_unbounded_demo(0.01, K, -0.1);
    for (std::size_t k = 0; k < r.size(); ++k) {
        CHECK(r[k].l2_discrepancy <= 0.01);
        if (k > 0 && K[k] > K[k - 1]) CHECK(r[k].gap > r[k - 1].gap);
    }
    CHECK_THROWS_AS(left_unbounded_demo(0.01, {1.0}, 0.5), DomainError);
}
