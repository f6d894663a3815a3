#include "cmx/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cmx/errors.hpp"

namespace cmx::special {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kImagTol = 1e-8;
constexpr double kEulerFailTol = 1e-6;

cplx cpow(cplx base, cplx w) { return std::exp(w * std::log(base)); }

double euler_margin(double mu) { return mu > 20.0 ? std::min(0.5, 10.0 / mu) : 0.5; }

// Trapezoid rule for the Euler integral after t = 1/(1+e^r) and the contour shift r -> r - i theta.
// The integrand is exp(A_k + i mu B_k / 2) with A, B independent of mu.
struct EulerContour {
    cplx z;
    double h;
    long k0;
    std::vector<cplx> A, B;

    EulerContour(cplx zz, double margin, double hh) : z(zz), h(hh) {
        cplx z2 = z * z;
        double phi = std::arg(z2);
        double theta = kPi - std::max(phi, 0.0) - margin;
        double lz = 2.0 * std::log(std::abs(z));
        if (!std::isfinite(lz) || std::abs(lz) > 690.0) throw DomainError("eigfun_u: |z| must lie in [1e-150, 1e150]");
        k0 = static_cast<long>(std::floor((lz - 160.0) / h));
        long k1 = static_cast<long>(std::ceil((54.0 + std::max(0.0, lz)) / h));
        A.resize(k1 - k0 + 1);
        B.resize(k1 - k0 + 1);
        for (long k = k0; k <= k1; ++k) {
            cplx w(k * h, -theta);
            cplx ew = std::exp(w);
            cplx l1 = std::log(1.0 + ew);
            cplx l2 = std::log(z2 + ew);
            A[k - k0] = 0.25 * w - 0.75 * l1 - 0.25 * l2;
            B[k - k0] = -w + l1 - l2;
        }
    }

    static cplx prefactor(cplx z, double mu) {
        return cpow(z, cplx(-0.5, mu)) * std::sin(cplx(0.75 * kPi, 0.5 * kPi * mu)) / kPi;
    }
};

struct Sums {
    cplx all = 0.0, even = 0.0;
    double abs_all = 0.0;
};

// rel: truncation plus rounding estimate; trunc: the part that a finer step would reduce
cplx finish(const EulerContour& c, const Sums& s, double mu, double* rel, double* mag = nullptr, double* trunc = nullptr) {
    cplx ih = c.h * s.all;
    cplx i2h = 2.0 * c.h * s.even;
    double scale = std::abs(ih);
    double disc = scale > 0 ? std::abs(ih - i2h) / scale : 0.0;
    double round = scale > 0 ? 4.0 * std::numeric_limits<double>::epsilon() * c.h * s.abs_all / scale : 0.0;
    double t = disc < 1e-3 ? disc * disc : disc;
    if (rel) *rel = t + round;
    if (trunc) *trunc = t;
    cplx pre = EulerContour::prefactor(c.z, mu);
    if (mag) *mag = std::abs(pre) * c.h * s.abs_all;
    return pre * ih;
}

Sums direct_sums(const EulerContour& c, double mu) {
    Sums s;
    const cplx im(0.0, 0.5 * mu);
    for (std::size_t j = 0; j < c.A.size(); ++j) {
        cplx f = std::exp(c.A[j] + im * c.B[j]);
        s.all += f;
        s.abs_all += std::abs(f);
        if ((c.k0 + static_cast<long>(j)) % 2 == 0) s.even += f;
    }
    return s;
}

// mag is the size of the summed terms; near a zero of u the residue is judged against it
void check_real_projection(cplx v, double mag, double x, double mu) {
    if (std::abs(v.imag()) > kImagTol * std::max(std::abs(v), mag)) {
        throw QuadratureError("eigfun_u: imaginary residue above tolerance at x=" + std::to_string(x) +
                                  " mu=" + std::to_string(mu),
                              std::abs(v.imag()) / std::abs(v));
    }
}

}  // namespace

bool in_omega(cplx z) {
    if (!(z.real() > 0.0)) return false;
    if (z.imag() == 0.0 && z.real() <= 1.0) return false;
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

cplx alpha(cplx z) {
    if (!in_omega(z)) throw DomainError("alpha: z must satisfy Re z > 0 and z not in [0,1]");
    return std::acos(1.0 / z);
}

cplx r_factor(cplx z) {
    if (!in_omega(z)) throw DomainError("r_factor: z must satisfy Re z > 0 and z not in [0,1]");
    return cpow(z, -0.5) * cpow(z * z - 1.0, -0.25);
}

double eigenvalue_nu(double mu) {
    if (!(mu >= 0.0)) throw DomainError("eigenvalue_nu: mu must be >= 0");
    return kPi / std::cosh(kPi * mu);
}

double gamma_star(double x0) {
    if (!(x0 >= 1.0)) throw DomainError("gamma_star: x0 must be >= 1");
    return 2.0 / kPi * std::asin(1.0 / x0);
}

double c_star(double x0) {
    if (!(x0 > 1.0)) throw DomainError("c_star: x0 must be > 1 (use the logarithmic law at x0 = 1)");
    double as = std::asin(1.0 / x0);
    double ac = std::acos(1.0 / x0);
    double lead = 0.5 * std::sqrt(x0 / (2.0 * (x0 * x0 - 1.0) * as));
    return lead * std::pow(2.0 * kPi * as / ac, ac / kPi);
}

AsymptoticParams asymptotic_params(double x0, cplx z) {
    if (!(x0 >= 1.0)) throw DomainError("asymptotic_params: x0 must be >= 1");
    AsymptoticParams p;
    p.z = z;
    p.x0 = x0;
    p.alpha = alpha(z);
    p.r_factor = r_factor(z);
    cplx a0 = x0 == 1.0 ? cplx(0.0) : alpha(cplx(x0));
    p.beta = (a0 + p.alpha) / kPi;
    return p;
}

static cplx euler_with_magnitude(cplx z, double mu, double* rel_error, double* mag) {
    if (!(mu >= 0.0)) throw DomainError("eigfun_u: mu must be >= 0");
    if (!(z.real() > 0.0)) throw DomainError("eigfun_u: Re z must be > 0");
    double margin = euler_margin(mu);
    double h = 2.0 * kPi * margin / 40.0;
    double rel = 0.0, trunc = 0.0;
    cplx v;
    for (int refine = 0; refine < 4; ++refine) {
        EulerContour c(z, margin, h);
        Sums s = direct_sums(c, mu);
        v = finish(c, s, mu, &rel, mag, &trunc);
        if (trunc <= 1e-13) break;
        h *= 0.5;
    }
    if (rel_error) *rel_error = rel;
    if (!(rel <= kEulerFailTol) || !std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw QuadratureError("eigfun_u: Euler integral did not converge at mu=" + std::to_string(mu), rel);
    }
    return v;
}

cplx eigfun_u_euler(cplx z, double mu, double* rel_error) { return euler_with_magnitude(z, mu, rel_error, nullptr); }

double eigfun_u_series(double x, double mu) {
    if (!(x >= 1.0)) throw DomainError("eigfun_u_series: x must be >= 1");
    if (x == 1.0) return 1.0;
    // u(x) = x^{-1} F(1/4 + i mu/2, 1/4 - i mu/2; 1; 1 - 1/x^2), all terms positive.
    const double w = 1.0 - 1.0 / (x * x);
    const double q = 0.25 * mu * mu;
    double term = 1.0, sum = 1.0;
    for (long k = 0; k < 50000000L; ++k) {
        double kk = static_cast<double>(k);
        double ratio = ((kk + 0.25) * (kk + 0.25) + q) / ((kk + 1.0) * (kk + 1.0)) * w;
        term *= ratio;
        sum += term;
        double rho = std::max(ratio, w);
        if (rho < 1.0 && term * rho / (1.0 - rho) <= 1e-17 * sum) {
            if (!std::isfinite(sum)) break;
            return sum / x;
        }
    }
    throw QuadratureError("eigfun_u_series: series did not converge at x=" + std::to_string(x) + ", mu=" + std::to_string(mu), 1.0);
}

cplx eigfun_u_asymptotic(cplx z, double mu) {
    if (!(mu > 0.0)) throw DomainError("eigfun_u_asymptotic: mu must be > 0");
    return r_factor(z) * std::exp(mu * alpha(z)) / std::sqrt(2.0 * kPi * mu);
}

EigenfunctionSample eigfun_sample(cplx z, double mu, const EigOptions& opt) {
    if (!(mu >= 0.0)) throw DomainError("eigfun_u: mu must be >= 0");
    EigenfunctionSample s{mu, z, 0.0, UMethod::exact_one, 0.0};
    if (z.imag() == 0.0) {
        double x = z.real();
        if (!(x > 0.0)) throw DomainError("eigfun_u: x must be > 0");
        if (x == 1.0) {
            s.value = 1.0;
            return s;
        }
        if (x < 1.0) {
            double rel = 0.0, mag = 0.0;
            cplx v = euler_with_magnitude(z, mu, &rel, &mag);
            check_real_projection(v, mag, x, mu);
            s.value = v.real();
            s.method = UMethod::euler_integral;
            s.error_estimate = rel;
            return s;
        }
        if (mu > opt.mu_switch) {
            s.value = eigfun_u_asymptotic(z, mu).real();
            s.method = UMethod::asymptotic;
            s.error_estimate = 1.0 / mu;
            return s;
        }
        s.value = eigfun_u_series(x, mu);
        s.method = UMethod::hypergeometric_series;
        s.error_estimate = 1e-15;
        return s;
    }
    if (!in_omega(z)) throw DomainError("eigfun_u: complex point must lie in Omega");
    if (mu > opt.mu_switch) {
        s.value = eigfun_u_asymptotic(z, mu);
        s.method = UMethod::asymptotic;
        s.error_estimate = 1.0 / mu;
        return s;
    }
    double rel = 0.0;
    s.value = eigfun_u_euler(z, mu, &rel);
    s.method = UMethod::euler_integral;
    s.error_estimate = rel;
    return s;
}

cplx eigfun_u(cplx z, double mu, const EigOptions& opt) { return eigfun_sample(z, mu, opt).value; }

double eigfun_u(double x, double mu, const EigOptions& opt) { return eigfun_sample(cplx(x, 0.0), mu, opt).value.real(); }

std::vector<double> eigfun_u_exact_table(double x, const std::vector<double>& mus) {
    if (!(x > 0.0)) throw DomainError("eigfun_u_exact_table: x must be > 0");
    std::vector<double> out(mus.size());
    if (x >= 1.0) {
        for (std::size_t i = 0; i < mus.size(); ++i) out[i] = eigfun_u_series(x, mus[i]);
        return out;
    }
    if (mus.empty()) return out;
    double mu_top = *std::max_element(mus.begin(), mus.end());
    double margin = euler_margin(mu_top);
    EulerContour c(cplx(x, 0.0), margin, 2.0 * kPi * margin / 40.0);

    bool uniform = mus.size() > 2;
    double dmu = uniform ? mus[1] - mus[0] : 0.0;
    for (std::size_t i = 1; uniform && i < mus.size(); ++i) {
        if (std::abs(mus[i] - mus[i - 1] - dmu) > 1e-12 * std::max(1.0, std::abs(mus[i]))) uniform = false;
    }
    if (uniform && !(dmu > 0.0)) uniform = false;

    // Drop nodes that stay negligible over the whole mu range; they only cost denormal arithmetic.
    double mu_lo = *std::min_element(mus.begin(), mus.end());
    auto log_mag = [&](std::size_t j, double mu) { return c.A[j].real() - 0.5 * mu * c.B[j].imag(); };
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < c.A.size(); ++j) peak = std::max({peak, log_mag(j, mu_lo), log_mag(j, mu_top)});
    std::size_t first = 0, last = c.A.size();
    auto negligible = [&](std::size_t j) { return std::max(log_mag(j, mu_lo), log_mag(j, mu_top)) < peak - 60.0; };
    while (first + 2 < last && negligible(first)) first += 2;
    while (last > first + 2 && negligible(last - 1)) --last;
    c.A.erase(c.A.begin() + last, c.A.end());
    c.B.erase(c.B.begin() + last, c.B.end());
    c.A.erase(c.A.begin(), c.A.begin() + first);
    c.B.erase(c.B.begin(), c.B.begin() + first);
    c.k0 += static_cast<long>(first);

    const std::size_t n = c.A.size();
    std::vector<double> fr(n), fi(n), sr(n), si(n);
    if (uniform) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx st = std::exp(cplx(0.0, 0.5 * dmu) * c.B[j]);
            sr[j] = st.real();
            si[j] = st.imag();
        }
    }
    const int parity = static_cast<int>(((c.k0 % 2) + 2) % 2);
    for (std::size_t i = 0; i < mus.size(); ++i) {
        double mu = mus[i];
        bool reanchor = !uniform || i % 32 == 0;
        if (reanchor) {
            for (std::size_t j = 0; j < n; ++j) {
                cplx v = std::exp(c.A[j] + cplx(0.0, 0.5 * mu) * c.B[j]);
                fr[j] = v.real();
                fi[j] = v.imag();
            }
        } else {
            for (std::size_t j = 0; j < n; ++j) {
                double a = fr[j] * sr[j] - fi[j] * si[j];
                double b = fr[j] * si[j] + fi[j] * sr[j];
                fr[j] = a;
                fi[j] = b;
            }
        }
        double ar = 0, ai = 0, er = 0, ei = 0, ab = 0;
        for (std::size_t j = 0; j < n; ++j) {
            ar += fr[j];
            ai += fi[j];
            ab += std::abs(fr[j]) + std::abs(fi[j]);
        }
        for (std::size_t j = parity; j < n; j += 2) {
            er += fr[j];
            ei += fi[j];
        }
        Sums s;
        s.all = cplx(ar, ai);
        s.even = cplx(er, ei);
        s.abs_all = ab;
        double rel = 0.0, mag = 0.0, trunc = 0.0;
        cplx v = finish(c, s, mu, &rel, &mag, &trunc);
        if (!(trunc <= 1e-13) || !std::isfinite(v.real())) v = euler_with_magnitude(cplx(x, 0.0), mu, &rel, &mag);
        check_real_projection(v, mag, x, mu);
        out[i] = v.real();
    }
    return out;
}

}  // namespace cmx::special
