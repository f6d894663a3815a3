#pragma once

#include <complex>
#include <vector>

namespace cmx::special {

using cplx = std::complex<double>;

// Re z > 0 and z not in [0,1].
bool in_omega(cplx z);

cplx alpha(cplx z);
cplx r_factor(cplx z);
double eigenvalue_nu(double mu);
double gamma_star(double x0);
double c_star(double x0);

struct AsymptoticParams {
    cplx z;
    cplx alpha;
    cplx r_factor;
    cplx beta;  // (alpha(x0) + alpha(z))/pi
    double x0;
};

AsymptoticParams asymptotic_params(double x0, cplx z);

enum class UMethod { euler_integral, hypergeometric_series, asymptotic, exact_one };

struct EigenfunctionSample {
    double mu;
    cplx point;
    cplx value;
    UMethod method;
    double error_estimate;  // relative
};

struct EigOptions {
    double mu_switch = 20.0;
};

// Hybrid evaluation of u(z; mu). Real x in (0,1] never uses the asymptotic branch.
EigenfunctionSample eigfun_sample(cplx z, double mu, const EigOptions& opt = {});
cplx eigfun_u(cplx z, double mu, const EigOptions& opt = {});
double eigfun_u(double x, double mu, const EigOptions& opt = {});

// Individual branches.
cplx eigfun_u_euler(cplx z, double mu, double* rel_error = nullptr);
double eigfun_u_series(double x, double mu);  // x >= 1
cplx eigfun_u_asymptotic(cplx z, double mu);

// Exact values u(x; mu_k) for real x > 0 over a list of mu; no asymptotic branch.
std::vector<double> eigfun_u_exact_table(double x, const std::vector<double>& mus);

}  // namespace cmx::special
