#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cmx/cmf.hpp"

namespace cmx::local {

// f0 as seen by the local problem: pointwise values and the moments (Lambda f0)(t) with two t-derivatives.
struct ReferenceF0 {
    std::function<double(double)> value;
    std::function<double(double)> moment;
    std::function<double(double)> moment_d1;
    std::function<double(double)> moment_d2;
    double l2_norm_sq = 0.0;
    std::optional<CmfMeasure> atoms;

    static ReferenceF0 from_measure(const CmfMeasure& f);
    static ReferenceF0 exponential();  // e^{-x}
    double l2_norm() const;
};

struct LocalOptions {
    double t_max = 0.0;  // 0 selects 50 + 10 x0
    int grid_points = 2000;
    double tol_cert = 1e-10;  // relative to ||f0||_2^2
    int max_outer = 200;
    double prune = 1e-12;
    double merge = 1e-6;
    std::vector<double> initial_support = {0.0, 1.0, 3.0};
    bool polish = true;
};

struct IterationRecord {
    int iteration;
    std::size_t atoms;
    double cert_min;
    double t_min;
    double residual_l2;
};

struct CapriniState {
    ReferenceF0 f0;
    double x0 = 1.0;
    double delta = 0.0;
    CmfMeasure support;
    double m = 0.0;
    double cert_min = 0.0;
    double t_cert_min = 0.0;
    double residual_l2 = 0.0;
    double t_max = 0.0;
    bool converged = false;
    int iterations = 0;
    std::vector<IterationRecord> history;
    std::string diagnostics;

    double C(double t) const;
    double C_hat(double t) const;
    double C_hat_d1(double t) const;
    // |f*(x0) - f0(x0) - delta| / (|f0(x0)| + |delta|)
    double constraint_residual() const;
    // int f*(f* - f0) dx / (f0(x0) + delta), the multiplier identity
    double multiplier_from_identity() const;
    // min of C_hat over {0} and n log-spaced points up to t_max, and max |C_hat(t_j)| over atoms
    double certificate_grid_min(int n = 10000) const;
    double atom_residual() const;
};

double caprini_C(const CapriniState& state, double t);

CapriniState solve_local(const ReferenceF0& f0, double x0, double delta, const LocalOptions& opt = {});

struct SweepResult {
    double eps = 0.0;
    double M_eps = 0.0;
    double m_eps = 0.0;
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    CapriniState plus;
    CapriniState minus;
};

SweepResult sweep_epsilon(const ReferenceF0& f0, double x0, double eps, const LocalOptions& opt = {});

// Exact solution for f0 = e^{-x}: a + b e^{-x tau} for delta > 0, a e^{-x tau} for delta in (-e^{-x0}, 0).
CapriniState exp_closed_form(double x0, double delta);

struct ESlopes {
    double E_plus;
    double E_minus;
};

ESlopes e_slopes(double x0);

// ||f* - f0||_2 on [0,1] by Gauss-Legendre on the pointwise difference.
double residual_l2(const ReferenceF0& f0, const CmfMeasure& f, int n = 160);

}  // namespace cmx::local
