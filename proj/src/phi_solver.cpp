#include "cmx/phi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <future>
#include <numbers>
#include <sstream>
#include <thread>

#include "cmx/errors.hpp"
#include "cmx/quadrature.hpp"
#include "cmx/special_fn.hpp"

namespace cmx::phi {

namespace {

constexpr double pi = std::numbers::pi;

double sech_pi(double mu) {
    double a = pi * mu;
    return a > 700.0 ? 0.0 : 1.0 / std::cosh(a);
}

double alpha_real(double x) { return x > 1.0 ? std::acos(1.0 / x) : 0.0; }

struct Integrals {
    double psi = 0.0;
    double l2sq = 0.0;
    double hardysq = 0.0;
    double last_psi = 0.0;
    double last_hardy = 0.0;
};

Integrals spectral_integrals(const SpectralGrid& g, double vhat) {
    Integrals s;
    double two_e2 = 2.0 * vhat * vhat;
    const std::vector<double>& u = *g.u_x0;
    for (std::size_t k = 0; k < g.mu.size(); ++k) {
        double mu = g.mu[k];
        double sech = sech_pi(mu);
        double cr = 1.0 / (two_e2 + sech);
        double r = sech * cr;
        double base = u[k] * u[k] * mu * std::tanh(pi * mu);
        double fp = base * r;
        double fh = base * sech * cr * cr / pi;
        s.psi += g.weights[k] * fp;
        s.l2sq += g.weights[k] * base * r * r;
        s.hardysq += g.weights[k] * fh;
        s.last_psi = fp;
        s.last_hardy = fh;
    }
    return s;
}

double tail_mu_max(double vhat, double rate, double tol) {
    double mu_star = std::max(0.0, -2.0 / pi * std::log(vhat));
    return mu_star + 6.0 + std::log(1.0 / tol) / rate;
}

SpectralGrid make_grid(const std::shared_ptr<SpectralCache>& cache, double mu_max, double step) {
    SpectralGrid g;
    int n = static_cast<int>(std::ceil(mu_max / step - 1e-9));
    if (n % 2) ++n;
    n = std::max(n, 2);
    g.step = step;
    g.mu_max = n * step;
    g.mu.resize(n + 1);
    for (int i = 0; i <= n; ++i) g.mu[i] = i * step;
    g.weights = quad::simpson_weights(n, step);
    g.u_x0 = cache->samples(n + 1);
    return g;
}

}  // namespace

SpectralCache::SpectralCache(double x0, double step, double mu_switch)
    : x0_(x0), step_(step), mu_switch_(mu_switch), data_(std::make_shared<std::vector<double>>()) {
    if (!(x0 >= 1.0) || !std::isfinite(x0)) throw DomainError("SpectralCache: x0 must be >= 1");
    if (!(step > 0.0)) throw DomainError("SpectralCache: step must be positive");
}

std::shared_ptr<const std::vector<double>> SpectralCache::samples(std::size_t count) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (data_->size() >= count) return data_;
    std::size_t have = data_->size();
    std::size_t want = std::max(count, have + have / 2);
    auto next = std::make_shared<std::vector<double>>(*data_);
    next->resize(want);
    if (x0_ == 1.0) {
        std::fill(next->begin() + have, next->end(), 1.0);
    } else {
        std::vector<double> mus;
        std::vector<std::size_t> idx;
        for (std::size_t k = have; k < want; ++k) {
            double mu = k * step_;
            if (mu > mu_switch_) {
                (*next)[k] = special::eigfun_u_asymptotic(x0_, mu).real();
            } else {
                mus.push_back(mu);
                idx.push_back(k);
            }
        }
        if (!mus.empty()) {
            std::vector<double> vals = special::eigfun_u_exact_table(x0_, mus);
            for (std::size_t j = 0; j < idx.size(); ++j) (*next)[idx[j]] = vals[j];
        }
    }
    data_ = next;
    return data_;
}

double PhiSolution::pythagoras_residual() const {
    return std::abs(norm_l2 * norm_l2 + veps * veps * norm_hardy * norm_hardy - psi_at_x0) / psi_at_x0;
}

double PhiSolution::p_of_eps() const { return psi_at_x0 / (norm_l2 * norm_l2); }

PhiSolution solve_psi(double x0, double veps, const SolverOptions& opt) {
    if (!(x0 >= 1.0) || !std::isfinite(x0)) throw DomainError("solve_psi: x0 must be >= 1");
    return solve_psi(std::make_shared<SpectralCache>(x0, opt.mu_step, opt.mu_switch), veps, opt);
}

PhiSolution solve_psi(const std::shared_ptr<SpectralCache>& cache, double veps, const SolverOptions& opt) {
    if (!(veps > 0.0 && veps <= 1.0)) throw DomainError("solve_psi: veps must lie in (0, 1]");
    if (!(opt.tail_tol > 0.0)) throw DomainError("solve_psi: tail_tol must be positive");
    if (std::abs(cache->step() - opt.mu_step) > 1e-15) throw DomainError("solve_psi: cache step differs from mu_step");
    PhiSolution sol;
    sol.x0 = cache->x0();
    sol.veps = veps;
    sol.veps_hat = veps / std::sqrt(2.0 * pi);
    sol.options = opt;
    sol.cache = cache;
    double rate = pi - 2.0 * alpha_real(sol.x0);
    double mu_max = opt.mu_max_override > 0.0 ? opt.mu_max_override : tail_mu_max(sol.veps_hat, rate, opt.tail_tol);
    for (int attempt = 0;; ++attempt) {
        sol.grid = make_grid(cache, mu_max, opt.mu_step);
        Integrals s = spectral_integrals(sol.grid, sol.veps_hat);
        double tail = std::max(s.last_psi / rate / s.psi, s.last_hardy / rate / s.hardysq);
        sol.mu_max = sol.grid.mu_max;
        sol.psi_at_x0 = s.psi;
        sol.norm_l2 = std::sqrt(s.l2sq);
        sol.norm_hardy = std::sqrt(s.hardysq);
        sol.tail_estimate = tail;
        if (!std::isfinite(s.psi) || !(s.psi > 0.0)) throw QuadratureError("solve_psi: non-finite spectral integral", tail);
        if (tail <= opt.tail_tol) break;
        if (opt.mu_max_override > 0.0 || attempt >= 5) {
            std::ostringstream os;
            os << "solve_psi: estimated tail mass " << tail << " exceeds " << opt.tail_tol << " at mu_max "
               << sol.mu_max;
            throw QuadratureError(os.str(), tail);
        }
        mu_max = sol.mu_max + std::log(tail / opt.tail_tol) / rate + 1.0;
    }
    sol.eps = sol.norm_l2 / sol.norm_hardy;
    sol.delta_star = sol.psi_at_x0 / sol.norm_hardy;
    return sol;
}

cplx psi_value(const PhiSolution& sol, cplx z) {
    if (z.imag() == 0.0 && z.real() == sol.x0) return sol.psi_at_x0;
    bool real_line = z.imag() == 0.0 && z.real() > 0.0;
    if (!real_line && !special::in_omega(z)) throw DomainError("psi_value: z must lie in Omega or (0, 1]");
    double az = real_line ? alpha_real(z.real()) : std::max(0.0, special::alpha(z).real());
    double rate = pi - alpha_real(sol.x0) - az;
    double mu_max = tail_mu_max(sol.veps_hat, rate, sol.options.tail_tol);
    int n = static_cast<int>(std::ceil(mu_max / sol.grid.step - 1e-9));
    if (n % 2) ++n;
    n = std::max(n, 2);
    if (rate <= pi - 2.0 * alpha_real(sol.x0)) n = std::max(n, static_cast<int>(sol.grid.mu.size()) - 1);
    std::vector<double> mus(n + 1);
    for (int i = 0; i <= n; ++i) mus[i] = i * sol.grid.step;
    std::vector<double> w = quad::simpson_weights(n, sol.grid.step);
    auto ux0 = sol.cache->samples(n + 1);
    std::vector<cplx> uz(n + 1);
    if (real_line) {
        std::vector<double> v = special::eigfun_u_exact_table(z.real(), mus);
        for (int i = 0; i <= n; ++i) uz[i] = v[i];
    } else {
        special::EigOptions eo;
        if (std::isfinite(sol.options.mu_switch)) eo.mu_switch = sol.options.mu_switch;
        for (int i = 0; i <= n; ++i) uz[i] = special::eigfun_u(z, mus[i], eo);
    }
    double two_e2 = 2.0 * sol.veps_hat * sol.veps_hat;
    cplx s = 0.0;
    for (int i = 0; i <= n; ++i) {
        double mu = mus[i];
        double sech = sech_pi(mu);
        double r = sech / (two_e2 + sech);
        s += w[i] * (*ux0)[i] * uz[i] * (mu * std::tanh(pi * mu) * r);
    }
    return s;
}

double psi_value(const PhiSolution& sol, double x) {
    if (!(x > 0.0)) throw DomainError("psi_value: x must be positive");
    return psi_value(sol, cplx(x, 0.0)).real();
}

double eps_of_veps(const PhiSolution& sol) { return sol.norm_l2 / sol.norm_hardy; }

DeltaStarPoint delta_star_solve(double x0, double eps, const SolverOptions& opt, std::shared_ptr<SpectralCache> cache) {
    if (!(eps > 0.0 && eps < 0.5)) throw DomainError("delta_star: eps must lie in (0, 1/2)");
    if (!(x0 >= 1.0) || !std::isfinite(x0)) throw DomainError("delta_star: x0 must be >= 1");
    if (!cache) cache = std::make_shared<SpectralCache>(x0, opt.mu_step, opt.mu_switch);
    double lo = -16.0, hi = 0.0;
    PhiSolution slo = solve_psi(cache, std::pow(10.0, lo), opt);
    PhiSolution shi = solve_psi(cache, std::pow(10.0, hi), opt);
    if (!(slo.eps <= eps && eps <= shi.eps)) {
        std::ostringstream os;
        os << "delta_star: eps " << eps << " not bracketed by eps(veps) on log10 veps in [" << lo << ", " << hi
           << "]: [" << slo.eps << ", " << shi.eps << "]";
        throw BracketError(os.str(), {{lo, slo.eps}, {hi, shi.eps}});
    }
    PhiSolution mid = shi;
    for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (lo + hi);
        mid = solve_psi(cache, std::pow(10.0, m), opt);
        if (mid.eps < eps) lo = m; else hi = m;
    }
    DeltaStarPoint p;
    p.eps = eps;
    p.veps = mid.veps;
    p.delta_star = mid.delta_star;
    p.solution = std::move(mid);
    return p;
}

double delta_star_at(double x0, double eps, const SolverOptions& opt) {
    return delta_star_solve(x0, eps, opt).delta_star;
}

double delta_star_asymptotic(double x0, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw DomainError("delta_star_asymptotic: eps must lie in (0, 1)");
    if (x0 == 1.0) return std::numbers::sqrt2 / pi * eps * std::abs(std::log(eps));
    return special::c_star(x0) * std::pow(eps, special::gamma_star(x0));
}

std::vector<double> eps_decades(double lo, double hi, int per_decade) {
    if (!(lo > 0.0 && hi > lo) || per_decade < 1) throw DomainError("eps_decades: need 0 < lo < hi");
    int n = static_cast<int>(std::round(std::log10(hi / lo) * per_decade)) + 1;
    return quad::logspace(lo, hi, std::max(n, 2));
}

PowerlawResult powerlaw_fit(double x0, const std::vector<double>& eps, const SolverOptions& opt, int workers) {
    if (eps.size() < 2) throw DomainError("powerlaw_fit: need at least two eps values");
    auto [mn, mx] = std::minmax_element(eps.begin(), eps.end());
    if (std::log10(*mx / *mn) < 4.0 - 1e-9) throw DomainError("powerlaw_fit: eps must span at least 4 decades");
    std::vector<double> e(eps);
    std::sort(e.begin(), e.end());
    auto cache = std::make_shared<SpectralCache>(x0, opt.mu_step, opt.mu_switch);
    std::vector<DeltaStarPoint> pts(e.size());
    workers = std::max(1, workers);
    // warm the cache at the smallest eps before fanning out
    pts[0] = delta_star_solve(x0, e[0], opt, cache);
    std::vector<std::future<void>> jobs;
    std::atomic<std::size_t> next{1};
    for (int w = 0; w < workers; ++w)
        jobs.push_back(std::async(std::launch::async, [&] {
            for (std::size_t i; (i = next++) < e.size();) pts[i] = delta_star_solve(x0, e[i], opt, cache);
        }));
    for (auto& j : jobs) j.get();

    PowerlawResult res;
    res.x0 = x0;
    res.gamma_star = x0 == 1.0 ? 1.0 : special::gamma_star(x0);
    std::size_t n = e.size();
    std::vector<double> lx(n), ly(n);
    for (std::size_t i = 0; i < n; ++i) {
        lx[i] = std::log(e[i]);
        ly[i] = std::log(pts[i].delta_star);
    }
    double mxl = 0, myl = 0;
    for (std::size_t i = 0; i < n; ++i) mxl += lx[i], myl += ly[i];
    mxl /= n;
    myl /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) sxy += (lx[i] - mxl) * (ly[i] - myl), sxx += (lx[i] - mxl) * (lx[i] - mxl);
    res.slope = sxy / sxx;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? n - 1 : i + 1;
        PowerlawRow row;
        row.eps = e[i];
        row.veps = pts[i].veps;
        row.delta_star = pts[i].delta_star;
        row.asymptotic_value = delta_star_asymptotic(x0, e[i]);
        row.ratio = row.delta_star / row.asymptotic_value;
        row.local_slope = (ly[b] - ly[a]) / (lx[b] - lx[a]);
        res.rows.push_back(row);
    }
    return res;
}

PhiExtremal::PhiExtremal(PhiSolution sol) : sol_(std::move(sol)), scale_(1.0 / sol_.norm_hardy) {}

cplx PhiExtremal::operator()(cplx z) const { return scale_ * psi_value(sol_, z); }

double PhiExtremal::operator()(double x) const { return scale_ * psi_value(sol_, x); }

double PhiExtremal::value_at_x0() const { return scale_ * sol_.psi_at_x0; }

PhiExtremal phi_extremal(const PhiSolution& sol) { return PhiExtremal(sol); }

}  // namespace cmx::phi

namespace cmx::phi {

PhiExtremal::Check PhiExtremal::verify(int n, double s_max) const {
    quad::Rule rule = quad::log_gauss_legendre(n, s_max);
    std::vector<double> psi(n);
    for (int i = 0; i < n; ++i) psi[i] = psi_value(sol_, rule.x[i]);
    double l2 = 0.0, kk = 0.0, kg = 0.0;
    for (int i = 0; i < n; ++i) {
        double wi = rule.w[i] * psi[i];
        l2 += wi * psi[i];
        kg += wi / (rule.x[i] + sol_.x0);
        for (int j = 0; j < n; ++j) kk += wi * rule.w[j] * psi[j] / (rule.x[i] + rule.x[j]);
    }
    double v4 = std::pow(sol_.veps, 4);
    double hardy_sq = (kk - 2.0 * kg + 0.5 / sol_.x0) / v4;
    return {scale_ * std::sqrt(l2), scale_ * std::sqrt(std::max(hardy_sq, 0.0))};
}

}  // namespace cmx::phi
