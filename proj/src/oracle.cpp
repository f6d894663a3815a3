#include "cmx/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "cmx/errors.hpp"
#include "cmx/nnls.hpp"
#include "cmx/quadrature.hpp"

namespace cmx::oracle {

double NystromSolution::extend(double z) const {
    long double k = 0.0L;
    for (std::size_t j = 0; j < grid.size(); ++j)
        k += static_cast<long double>(grid.weights[j]) * grid.values[j] / (static_cast<long double>(z) + grid.nodes[j]);
    return static_cast<double>((1.0L / (static_cast<long double>(z) + x0) - k) / eps2);
}

cplx NystromSolution::extend(cplx z) const {
    return (1.0 / (z + x0) - opk::apply_K(grid, z)) / eps2;
}

double NystromSolution::pythagoras_residual() const {
    return std::abs(norm_l2 * norm_l2 + eps2 * norm_hardy * norm_hardy - psi_at_x0) / psi_at_x0;
}

NystromSolution nystrom_solve(double x0, double eps2, int n) {
    if (!(x0 >= 1.0) || !std::isfinite(x0)) throw DomainError("nystrom_solve: x0 must be >= 1");
    if (n < 50) throw DomainError("nystrom_solve: need n >= 50");
    if (!(eps2 > 0.0)) throw DomainError("nystrom_solve: eps2 must be positive");
    double cond = (std::numbers::pi + eps2) / eps2;
    if (eps2 < 1e-10) {
        std::ostringstream os;
        os << "nystrom_solve: eps2 = " << eps2 << " below grid resolution (condition ~ " << cond << ")";
        throw ConditioningError(os.str(), cond);
    }
    quad::Rule rule = quad::gauss_legendre(n, 0.0, 1.0);
    Eigen::VectorXd s(n), g(n);
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i) {
        s[i] = std::sqrt(rule.w[i]);
        g[i] = 1.0 / (x0 + rule.x[i]);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = s[i] * s[j] / (rule.x[i] + rule.x[j]);
    Eigen::MatrixXd A = K;
    A.diagonal().array() += eps2;
    Eigen::VectorXd rhs = s.cwiseProduct(g);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw ConditioningError("nystrom_solve: factorization failed", cond);
    Eigen::VectorXd y = llt.solve(rhs);
    auto residual = [&](const Eigen::VectorXd& v) {
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) {
            long double acc = rhs[i];
            for (int j = 0; j < n; ++j) acc -= static_cast<long double>(A(i, j)) * v[j];
            r[i] = static_cast<double>(acc);
        }
        return r;
    };
    for (int it = 0; it < 3; ++it) y += llt.solve(residual(y));

    NystromSolution sol;
    sol.x0 = x0;
    sol.eps2 = eps2;
    sol.condition_estimate = cond;
    sol.grid.nodes = rule.x;
    sol.grid.weights = rule.w;
    sol.grid.values.resize(n);
    for (int i = 0; i < n; ++i) sol.grid.values[i] = y[i] / s[i];

    long double l2 = 0.0L, kk = 0.0L, kg = 0.0L;
    double rmax = 0.0;
    for (int i = 0; i < n; ++i) {
        long double ky = 0.0L;
        for (int j = 0; j < n; ++j) ky += static_cast<long double>(K(i, j)) * y[j];
        long double psi = static_cast<long double>(y[i]) / s[i];
        long double kpsi = ky / s[i];
        rmax = std::max(rmax, static_cast<double>(std::abs(eps2 * psi + kpsi - g[i])));
        l2 += rule.w[i] * psi * psi;
        kk += rule.w[i] * psi * kpsi;
        kg += rule.w[i] * psi * g[i];
    }
    sol.system_residual = rmax / g.cwiseAbs().maxCoeff();
    sol.norm_l2 = static_cast<double>(std::sqrt(l2));
    sol.psi_at_x0 = static_cast<double>((0.5L / x0 - kg) / eps2);
    long double hardy_sq = (kk - 2.0L * kg + 0.5L / x0) / (static_cast<long double>(eps2) * eps2);
    sol.norm_hardy = static_cast<double>(std::sqrt(std::max(hardy_sq, 0.0L)));
    return sol;
}

NystromSolution nystrom_match_eps(double x0, double eps, int n) {
    if (!(eps > 0.0 && eps < 0.5)) throw DomainError("nystrom_match_eps: eps must lie in (0, 1/2)");
    auto f = [&](double lv) { return nystrom_solve(x0, std::exp(2.0 * lv), n).eps() - eps; };
    double lo = std::log(1e-5) + 1e-9, hi = 0.0;
    double flo = f(lo), fhi = f(hi);
    if (!(flo <= 0.0 && fhi >= 0.0))
        throw BracketError("nystrom_match_eps: eps outside the Nystrom validity range", {{lo, flo}, {hi, fhi}});
    std::uintmax_t it = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), it);
    return nystrom_solve(x0, std::exp(r.first + r.second), n);
}

std::vector<double> default_t_grid(double x0, int n, double t_max) {
    if (n < 2) throw DomainError("default_t_grid: need n >= 2");
    if (t_max <= 0.0) t_max = 50.0 + 10.0 * x0;
    std::vector<double> t = quad::logspace(1e-2, t_max, n - 1);
    t.insert(t.begin(), 0.0);
    return t;
}

GridLocalResult grid_local_solve(const local::ReferenceF0& f0, double x0, double delta,
                                 const std::vector<double>& t_grid) {
    double f0x = f0.value(x0);
    if (!(delta > -f0x)) throw DomainError("grid_local_solve: infeasible delta, need delta > -f0(x0)");
    if (t_grid.empty() || t_grid.size() > 2000) throw DomainError("grid_local_solve: t_grid size must be in [1, 2000]");
    const int nq = 80;
    const double W = 100.0;
    quad::Rule rule = quad::gauss_legendre(nq, 0.0, 1.0);
    const int nt = static_cast<int>(t_grid.size());
    Eigen::MatrixXd A(nq + 1, nt);
    Eigen::VectorXd b(nq + 1);
    for (int i = 0; i < nq; ++i) {
        double sw = std::sqrt(rule.w[i]);
        for (int j = 0; j < nt; ++j) A(i, j) = sw * std::exp(-rule.x[i] * t_grid[j]);
        b[i] = sw * f0.value(rule.x[i]);
    }
    for (int j = 0; j < nt; ++j) A(nq, j) = W * std::exp(-x0 * t_grid[j]);
    // penalty row with a shifted target until the constraint holds
    double c = f0x + delta, target = c;
    NnlsResult r;
    for (int k = 0; k < 200; ++k) {
        b[nq] = W * target;
        r = nnls(A, b);
        double err = c - A.row(nq).dot(r.x) / W;
        if (std::abs(err) <= 1e-13 * std::abs(c)) break;
        target += err;
    }
    std::vector<Atom> atoms;
    for (int j = 0; j < nt; ++j)
        if (r.x[j] > 0.0) atoms.push_back({t_grid[j], r.x[j]});
    GridLocalResult out;
    out.measure = CmfMeasure(atoms);
    out.residual_l2 = local::residual_l2(f0, out.measure);
    out.constraint_error = out.measure(x0) - f0x - delta;
    out.t_grid = t_grid;
    return out;
}

double dual_bound_at(double x0, double eps, double p, int n) {
    if (!(p > 1.0)) throw DomainError("dual_bound_at: p must exceed 1");
    double v = eps * std::sqrt(p - 1.0);
    NystromSolution s = nystrom_solve(x0, v * v, n);
    return std::sqrt(p * eps * eps * s.psi_at_x0);
}

DualBound dual_upper_bound(double x0, double eps, const std::vector<double>& p_scan, int n) {
    if (p_scan.empty()) throw DomainError("dual_upper_bound: empty p scan");
    DualBound d;
    d.bound = std::numeric_limits<double>::infinity();
    for (double p : p_scan) {
        if (!std::isfinite(p)) throw DomainError("dual_upper_bound: p must be finite");
        double b = dual_bound_at(x0, eps, p, n);
        d.scan.push_back({p, b});
        if (b < d.bound) d.bound = b, d.p_best = p;
    }
    return d;
}

std::vector<LeftRow> left_unbounded_demo(double eps, const std::vector<double>& K_list, double c) {
    if (!(eps > 0.0)) throw DomainError("left_unbounded_demo: eps must be positive");
    if (!(c <= 0.0)) throw DomainError("left_unbounded_demo: c must be <= 0");
    std::vector<LeftRow> rows;
    for (double K : K_list) {
        if (!(K > 0.0)) throw DomainError("left_unbounded_demo: K must be positive");
        rows.push_back({K, eps * std::sqrt(-std::expm1(-2.0 * K)), eps * std::sqrt(2.0 * K) * std::exp(-K * c)});
    }
    return rows;
}

}  // namespace cmx::oracle
