#pragma once

#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <vector>

#include "cmx/cmf.hpp"

namespace cmx::phi {

using cplx = std::complex<double>;

struct SolverOptions {
    double mu_step = 0.02;
    double tail_tol = 1e-8;
    double mu_max_override = 0.0;  // 0 selects the tail rule
    double mu_switch = std::numeric_limits<double>::infinity();
};

// u(x0; k * step) for k = 0, 1, ..., extended on demand. Safe to share between threads.
class SpectralCache {
public:
    SpectralCache(double x0, double step, double mu_switch = std::numeric_limits<double>::infinity());
    std::shared_ptr<const std::vector<double>> samples(std::size_t count);
    double x0() const { return x0_; }
    double step() const { return step_; }

private:
    double x0_;
    double step_;
    double mu_switch_;
    std::mutex mutex_;
    std::shared_ptr<const std::vector<double>> data_;
};

struct SpectralGrid {
    std::vector<double> mu;
    std::vector<double> weights;
    double mu_max = 0.0;
    double step = 0.0;
    std::shared_ptr<const std::vector<double>> u_x0;  // at least mu.size() entries
};

struct PhiSolution {
    double x0 = 1.0;
    double veps = 0.0;
    double veps_hat = 0.0;
    double mu_max = 0.0;
    double psi_at_x0 = 0.0;
    double norm_l2 = 0.0;
    double norm_hardy = 0.0;
    double eps = 0.0;
    double delta_star = 0.0;
    double tail_estimate = 0.0;
    SpectralGrid grid;
    SolverOptions options;
    std::shared_ptr<SpectralCache> cache;

    double pythagoras_residual() const;  // relative
    double p_of_eps() const;             // psi(x0)/||psi||_2^2
};

PhiSolution solve_psi(double x0, double veps, const SolverOptions& opt = {});
PhiSolution solve_psi(const std::shared_ptr<SpectralCache>& cache, double veps, const SolverOptions& opt = {});

cplx psi_value(const PhiSolution& sol, cplx z);
double psi_value(const PhiSolution& sol, double x);

double eps_of_veps(const PhiSolution& sol);

struct DeltaStarPoint {
    double eps = 0.0;
    double veps = 0.0;
    double delta_star = 0.0;
    PhiSolution solution;
};

DeltaStarPoint delta_star_solve(double x0, double eps, const SolverOptions& opt = {},
                                std::shared_ptr<SpectralCache> cache = nullptr);
double delta_star_at(double x0, double eps, const SolverOptions& opt = {});

// C*(x0) eps^gamma*(x0) for x0 > 1, (sqrt 2/pi) eps |ln eps| at x0 = 1.
double delta_star_asymptotic(double x0, double eps);

struct PowerlawRow {
    double eps;
    double veps;
    double delta_star;
    double asymptotic_value;
    double ratio;
    double local_slope;
};

struct PowerlawResult {
    double x0 = 0.0;
    double slope = 0.0;
    double gamma_star = 0.0;
    std::vector<PowerlawRow> rows;
};

std::vector<double> eps_decades(double lo, double hi, int per_decade = 2);
PowerlawResult powerlaw_fit(double x0, const std::vector<double>& eps, const SolverOptions& opt = {}, int workers = 1);

// phi = eps psi / ||psi||_2, the extremal of the global problem.
class PhiExtremal {
public:
    explicit PhiExtremal(PhiSolution sol);
    cplx operator()(cplx z) const;
    double operator()(double x) const;
    double value_at_x0() const;
    double scale() const { return scale_; }
    const PhiSolution& solution() const { return sol_; }

    struct Check {
        double l2_norm;
        double hardy_norm;
    };
    // Both norms recomputed on an x-grid, independently of the mu-space formulas.
    Check verify(int n = 100, double s_max = 30.0) const;

private:
    PhiSolution sol_;
    double scale_;
};

PhiExtremal phi_extremal(const PhiSolution& sol);

// h_p norm of an exponential sum and the constants of the norm bridge.
double hp_norm(const CmfMeasure& f, double p, double* abs_error = nullptr);
double hp_constant(double p);
double hp_reverse_constant(double p);

}  // namespace cmx::phi
