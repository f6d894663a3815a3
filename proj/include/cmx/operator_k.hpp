#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "cmx/quadrature.hpp"

namespace cmx::opk {

using cplx = std::complex<double>;

// Samples of a function on a quadrature grid over [0,1].
struct UnitGridFunction {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> values;

    static UnitGridFunction sample(const quad::Rule& rule, const std::function<double(double)>& f);
    static UnitGridFunction gauss_legendre(int n, const std::function<double(double)>& f);
    // Gauss-Legendre in -ln x; resolves the x^{-1/2 + i mu} endpoint behaviour of eigenfunctions.
    static UnitGridFunction log_gauss_legendre(int n, double s_max, const std::function<double(double)>& f);
    std::size_t size() const { return nodes.size(); }
    double l2_norm() const;
    void validate() const;
};

double apply_K(const UnitGridFunction& f, double x);
cplx apply_K(const UnitGridFunction& f, cplx z);
double apply_Lambda(const UnitGridFunction& f, double t);
std::vector<double> apply_K_at_nodes(const UnitGridFunction& f);

// (f, K g)_2 with the same grid for both.
double gram_form(const UnitGridFunction& f, const UnitGridFunction& g);

// Uniform mu grid with composite Simpson weights; mu_max is rounded up to an even step count.
struct MuGrid {
    std::vector<double> mu;
    std::vector<double> weights;
    double mu_max = 0.0;
    double step = 0.0;

    static MuGrid uniform(double mu_max, double step);
};

// u(x_i; mu_k) for all grid nodes, row per node.
struct EigenTable {
    std::vector<double> x;
    std::vector<std::vector<double>> u;
};

EigenTable eigen_table(const std::vector<double>& xs, const MuGrid& grid);

struct UTransform {
    MuGrid grid;
    std::vector<double> coefficients;
    double l2_norm_sq = 0.0;
    double tail_estimate = 0.0;  // |f^(mu_max)|^2 mu_max relative to ||f||_2^2
    bool tail_warning = false;
    std::string warning;
    std::shared_ptr<const EigenTable> table;
};

struct TransformOptions {
    double mu_max = 12.0;
    double step = 0.05;
    double tail_tol = 1e-8;
};

UTransform u_forward(const UnitGridFunction& f, const TransformOptions& opt = {});
UTransform u_forward(const UnitGridFunction& f, const MuGrid& grid, double tail_tol = 1e-8);
double u_inverse(const UTransform& tf, double x);
double plancherel_sum(const UTransform& tf);

// max over probes of |L u - (mu^2 + 1/4) u| / |u|, centered differences with Richardson.
double diffop_L_residual(double mu, const std::vector<double>& x_probe, double h = 1e-4);

// ||K u - nu u||_2 / ||u||_2 over an n-node Gauss-Legendre grid. K acts on u through a
// log-variable rule with n_fine nodes on s in [0, s_max].
double eigen_relation_residual(double mu, int n = 200, int n_fine = 400, double s_max = 60.0);

}  // namespace cmx::opk
