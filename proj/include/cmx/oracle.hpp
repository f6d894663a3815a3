#pragma once

#include <complex>
#include <vector>

#include "cmx/cmf.hpp"
#include "cmx/local_caprini.hpp"
#include "cmx/operator_k.hpp"

namespace cmx::oracle {

using cplx = std::complex<double>;

struct NystromSolution {
    opk::UnitGridFunction grid;  // values are psi at the nodes
    double eps2 = 0.0;
    double x0 = 1.0;
    double psi_at_x0 = 0.0;
    double norm_l2 = 0.0;
    double norm_hardy = 0.0;
    double system_residual = 0.0;  // max |eps2 psi + K psi - g| / max |g| at nodes
    double condition_estimate = 0.0;

    double extend(double z) const;
    cplx extend(cplx z) const;
    double eps() const { return norm_l2 / norm_hardy; }
    double delta_star() const { return psi_at_x0 / norm_hardy; }
    double pythagoras_residual() const;
};

// (eps2 I + K) psi = 1/(x0 + .) on an n-node Gauss-Legendre grid; refused for eps2 < 1e-10.
NystromSolution nystrom_solve(double x0, double eps2, int n = 400);

// Matches eps(veps) = eps by root finding on log veps.
NystromSolution nystrom_match_eps(double x0, double eps, int n = 400);

struct GridLocalResult {
    CmfMeasure measure;
    double residual_l2 = 0.0;
    double constraint_error = 0.0;
    std::vector<double> t_grid;
};

// {0} together with n-1 log-spaced points on [1e-2, t_max]; t_max = 50 + 10 x0 when 0.
std::vector<double> default_t_grid(double x0, int n = 2000, double t_max = 0.0);

GridLocalResult grid_local_solve(const local::ReferenceF0& f0, double x0, double delta,
                                 const std::vector<double>& t_grid);

struct DualScanPoint {
    double p;
    double bound;
};

struct DualBound {
    double bound = 0.0;
    double p_best = 0.0;
    std::vector<DualScanPoint> scan;
};

// min over p of sqrt(q Q(eps sqrt(p/q))), q = p/(p-1), Q(v) = v^2 psi_v(x0) from the Nystrom solver.
DualBound dual_upper_bound(double x0, double eps, const std::vector<double>& p_scan, int n = 400);
double dual_bound_at(double x0, double eps, double p, int n = 400);

struct LeftRow {
    double K;
    double l2_discrepancy;
    double gap;
};

// f_K = f + eps sqrt(2K) e^{-Kx}: L2(0,1) distance and the gap at c <= 0.
std::vector<LeftRow> left_unbounded_demo(double eps, const std::vector<double>& K_list, double c = 0.0);

}  // namespace cmx::oracle
