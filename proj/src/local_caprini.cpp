#include "cmx/local_caprini.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "cmx/errors.hpp"
#include "cmx/quadrature.hpp"

namespace cmx::local {

ReferenceF0 ReferenceF0::from_measure(const CmfMeasure& f) {
    if (f.empty()) throw DomainError("ReferenceF0: empty measure");
    ReferenceF0 r;
    r.value = [f](double x) { return f(x); };
    r.moment = [f](double t) { return f.moment(t); };
    r.moment_d1 = [f](double t) { return f.moment_d1(t); };
    r.moment_d2 = [f](double t) { return f.moment_d2(t); };
    r.l2_norm_sq = f.l2_norm_sq();
    r.atoms = f;
    return r;
}

ReferenceF0 ReferenceF0::exponential() { return from_measure(CmfMeasure({{1.0, 1.0}})); }

double ReferenceF0::l2_norm() const { return std::sqrt(l2_norm_sq); }

double residual_l2(const ReferenceF0& f0, const CmfMeasure& f, int n) {
    static thread_local quad::Rule rule;
    if (static_cast<int>(rule.x.size()) != n) rule = quad::gauss_legendre(n, 0.0, 1.0);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        double d = f(rule.x[i]) - f0.value(rule.x[i]);
        s += rule.w[i] * d * d;
    }
    return std::sqrt(s);
}

namespace {

double chat(const ReferenceF0& f0, const std::vector<double>& T, const std::vector<double>& A, double m, double x0,
            double t) {
    double s = -f0.moment(t) - m * std::exp(-x0 * t);
    for (std::size_t j = 0; j < T.size(); ++j) s += A[j] * gram_g(t + T[j]);
    return s;
}

double chat_d1(const ReferenceF0& f0, const std::vector<double>& T, const std::vector<double>& A, double m, double x0,
               double t) {
    double s = -f0.moment_d1(t) + x0 * m * std::exp(-x0 * t);
    for (std::size_t j = 0; j < T.size(); ++j) s += A[j] * gram_g1(t + T[j]);
    return s;
}

double chat_d2(const ReferenceF0& f0, const std::vector<double>& T, const std::vector<double>& A, double m, double x0,
               double t) {
    double s = -f0.moment_d2(t) - x0 * x0 * m * std::exp(-x0 * t);
    for (std::size_t j = 0; j < T.size(); ++j) s += A[j] * gram_g2(t + T[j]);
    return s;
}

struct QpResult {
    std::vector<double> a;
    double m = 0.0;
};

// min a'Ga - 2 b'a subject to e'a = c, a >= 0 (primal active set).
QpResult weight_qp(const ReferenceF0& f0, const std::vector<double>& T, double x0, double c) {
    const int n = static_cast<int>(T.size());
    Eigen::MatrixXd G(n, n);
    Eigen::VectorXd b(n), e(n);
    for (int i = 0; i < n; ++i) {
        b[i] = f0.moment(T[i]);
        e[i] = std::exp(-x0 * T[i]);
        for (int j = 0; j < n; ++j) G(i, j) = gram_g(T[i] + T[j]);
    }
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    int k0;
    e.maxCoeff(&k0);
    a[k0] = c / e[k0];
    std::vector<int> F = {k0};
    double lam = 0.0;
    double scale = b.cwiseAbs().maxCoeff() + 1e-300;
    for (int outer = 0; outer < 4 * n + 20; ++outer) {
        for (int inner = 0; inner < 4 * n + 20; ++inner) {
            if (F.empty()) {
                F.push_back(k0);
                a.setZero();
                a[k0] = c / e[k0];
            }
            const int mF = static_cast<int>(F.size());
            Eigen::MatrixXd K = Eigen::MatrixXd::Zero(mF + 1, mF + 1);
            Eigen::VectorXd rhs(mF + 1);
            for (int i = 0; i < mF; ++i) {
                for (int j = 0; j < mF; ++j) K(i, j) = G(F[i], F[j]);
                K(i, mF) = -e[F[i]];
                K(mF, i) = e[F[i]];
                rhs[i] = b[F[i]];
            }
            rhs[mF] = c;
            Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
            lam = sol[mF];
            bool positive = true;
            for (int i = 0; i < mF; ++i) positive = positive && sol[i] > 0.0;
            if (positive) {
                a.setZero();
                for (int i = 0; i < mF; ++i) a[F[i]] = sol[i];
                break;
            }
            double step = 1.0;
            int drop = -1;
            for (int i = 0; i < mF; ++i) {
                if (sol[i] <= 0.0) {
                    double ai = a[F[i]];
                    double r = ai - sol[i] > 0.0 ? ai / (ai - sol[i]) : 0.0;
                    if (r < step) step = r, drop = i;
                }
            }
            std::vector<int> keep;
            for (int i = 0; i < mF; ++i) {
                a[F[i]] += step * (sol[i] - a[F[i]]);
                if (i != drop && a[F[i]] > 1e-300) keep.push_back(F[i]);
                else a[F[i]] = 0.0;
            }
            F = keep;
        }
        Eigen::VectorXd w = G * a - b - lam * e;
        int best = -1;
        double wmin = -1e-15 * scale;
        for (int j = 0; j < n; ++j) {
            if (std::find(F.begin(), F.end(), j) != F.end()) continue;
            if (w[j] < wmin) wmin = w[j], best = j;
        }
        if (best < 0) break;
        F.push_back(best);
    }
    QpResult r;
    r.a.assign(a.data(), a.data() + n);
    r.m = lam;
    return r;
}

struct CertMin {
    double t;
    double value;
};

CertMin certificate_search(const ReferenceF0& f0, const std::vector<double>& T, const std::vector<double>& A, double m,
                           double x0, double t_max, int grid_points) {
    std::vector<double> grid = quad::logspace(1e-4, t_max, grid_points);
    grid.insert(grid.begin(), 0.0);
    std::size_t k = 0;
    double vmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = chat(f0, T, A, m, x0, grid[i]);
        if (v < vmin) vmin = v, k = i;
    }
    double lo = grid[k == 0 ? 0 : k - 1], hi = grid[std::min(k + 1, grid.size() - 1)];
    auto f = [&](double t) { return chat(f0, T, A, m, x0, t); };
    auto r = boost::math::tools::brent_find_minima(f, lo, hi, 52);
    if (r.second < vmin) return {r.first, r.second};
    return {grid[k], vmin};
}

CmfMeasure make_measure(const std::vector<double>& T, const std::vector<double>& A) {
    std::vector<Atom> at;
    for (std::size_t j = 0; j < T.size(); ++j) at.push_back({T[j], A[j]});
    return CmfMeasure(at);
}

// Newton on C_hat(t_j) = 0, C_hat'(t_j) = 0 (interior atoms) and the constraint, in (a, t_interior, m).
bool newton_polish(const ReferenceF0& f0, double x0, double c, double t_max, std::vector<double>& T,
                   std::vector<double>& A, double& m) {
    const int n = static_cast<int>(T.size());
    std::vector<int> interior;
    for (int j = 0; j < n; ++j)
        if (T[j] > 0.0 && T[j] < t_max) interior.push_back(j);
    const int k = static_cast<int>(interior.size());
    const int dim = n + k + 1;
    auto residual = [&](const std::vector<double>& t, const std::vector<double>& a, double mm) {
        Eigen::VectorXd F(dim);
        for (int j = 0; j < n; ++j) F[j] = chat(f0, t, a, mm, x0, t[j]);
        for (int q = 0; q < k; ++q) F[n + q] = chat_d1(f0, t, a, mm, x0, t[interior[q]]);
        double s = -c;
        for (int j = 0; j < n; ++j) s += a[j] * std::exp(-x0 * t[j]);
        F[n + k] = s;
        return F;
    };
    double scale = f0.l2_norm_sq;
    Eigen::VectorXd F = residual(T, A, m);
    double fn = F.cwiseAbs().maxCoeff();
    for (int it = 0; it < 50 && fn > 1e-16 * scale; ++it) {
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
        std::vector<int> tcol(n, -1);
        for (int q = 0; q < k; ++q) tcol[interior[q]] = n + q;
        for (int j = 0; j < n; ++j) {
            double tj = T[j];
            for (int i = 0; i < n; ++i) {
                J(j, i) = gram_g(tj + T[i]);
                if (tcol[i] >= 0) J(j, tcol[i]) = A[i] * gram_g1(tj + T[i]);
            }
            if (tcol[j] >= 0) J(j, tcol[j]) = chat_d1(f0, T, A, m, x0, tj) + A[j] * gram_g1(2 * tj);
            J(j, n + k) = -std::exp(-x0 * tj);
        }
        for (int q = 0; q < k; ++q) {
            int j = interior[q];
            double tj = T[j];
            for (int i = 0; i < n; ++i) {
                J(n + q, i) = gram_g1(tj + T[i]);
                if (tcol[i] >= 0) J(n + q, tcol[i]) = A[i] * gram_g2(tj + T[i]);
            }
            J(n + q, tcol[j]) = chat_d2(f0, T, A, m, x0, tj) + A[j] * gram_g2(2 * tj);
            J(n + q, n + k) = x0 * std::exp(-x0 * tj);
        }
        for (int i = 0; i < n; ++i) {
            double ei = std::exp(-x0 * T[i]);
            J(n + k, i) = ei;
            if (tcol[i] >= 0) J(n + k, tcol[i]) = -x0 * A[i] * ei;
        }
        Eigen::VectorXd dx = J.fullPivLu().solve(-F);
        if (!dx.allFinite()) return false;
        // damped step keeping weights positive and locations ordered
        double lambda = 1.0;
        for (int tries = 0; tries < 30; ++tries, lambda *= 0.5) {
            std::vector<double> Tn(T), An(A);
            for (int i = 0; i < n; ++i) An[i] += lambda * dx[i];
            for (int q = 0; q < k; ++q) Tn[interior[q]] += lambda * dx[n + q];
            double mn = m + lambda * dx[n + k];
            bool ok = true;
            for (int i = 0; i < n; ++i) ok = ok && An[i] > 0.0 && Tn[i] >= 0.0 && Tn[i] <= t_max;
            for (int i = 1; i < n && ok; ++i) ok = Tn[i] > Tn[i - 1];
            if (!ok) continue;
            Eigen::VectorXd Fn = residual(Tn, An, mn);
            double fnn = Fn.cwiseAbs().maxCoeff();
            if (fnn < fn || tries == 29) {
                if (!(fnn < fn)) return fn <= 1e-13 * scale;
                T = Tn, A = An, m = mn, F = Fn, fn = fnn;
                break;
            }
        }
        if (lambda < 1e-9) break;
    }
    return fn <= 1e-13 * scale;
}

struct Candidate {
    std::vector<double> T, A;
    double m = 0.0;
    double residual = 0.0;
    CertMin cert{0.0, 0.0};
};

}  // namespace

double CapriniState::C(double t) const { return C_hat(t) + m * std::exp(-x0 * t); }

double CapriniState::C_hat(double t) const {
    double s = -f0.moment(t) - m * std::exp(-x0 * t);
    for (const Atom& at : support.atoms()) s += at.a * gram_g(t + at.t);
    return s;
}

double CapriniState::C_hat_d1(double t) const {
    double s = -f0.moment_d1(t) + x0 * m * std::exp(-x0 * t);
    for (const Atom& at : support.atoms()) s += at.a * gram_g1(t + at.t);
    return s;
}

double CapriniState::constraint_residual() const {
    double f0x = f0.value(x0);
    return std::abs(support(x0) - f0x - delta) / (std::abs(f0x) + std::abs(delta));
}

double CapriniState::multiplier_from_identity() const {
    double s = 0.0;
    for (const Atom& at : support.atoms()) s += at.a * C(at.t);
    return s / (f0.value(x0) + delta);
}

double CapriniState::certificate_grid_min(int n) const {
    std::vector<double> grid = quad::logspace(1e-6, t_max, n - 1);
    double v = C_hat(0.0);
    for (double t : grid) v = std::min(v, C_hat(t));
    return v;
}

double CapriniState::atom_residual() const {
    double r = 0.0;
    for (const Atom& at : support.atoms()) r = std::max(r, std::abs(C_hat(at.t)));
    return r;
}

double caprini_C(const CapriniState& state, double t) {
    if (!(t >= 0.0)) throw DomainError("caprini_C: t must be >= 0");
    return state.C(t);
}

CapriniState solve_local(const ReferenceF0& f0, double x0, double delta, const LocalOptions& opt) {
    if (!(x0 >= 1.0) || !std::isfinite(x0)) throw DomainError("solve_local: x0 must be >= 1");
    double f0x = f0.value(x0);
    if (!(delta > -f0x)) throw DomainError("solve_local: infeasible delta, need delta > -f0(x0)");
    CapriniState st;
    st.f0 = f0;
    st.x0 = x0;
    st.delta = delta;
    st.t_max = opt.t_max > 0.0 ? opt.t_max : 50.0 + 10.0 * x0;
    if (delta == 0.0) {
        if (!f0.atoms) throw DomainError("solve_local: delta = 0 needs an atomic f0");
        st.support = *f0.atoms;
        st.converged = true;
        return st;
    }
    double c = f0x + delta;
    double tol = opt.tol_cert * f0.l2_norm_sq;
    std::vector<double> T;
    for (double t : opt.initial_support)
        if (t >= 0.0 && t <= st.t_max) T.push_back(t);
    if (T.empty()) T.push_back(0.0);
    std::sort(T.begin(), T.end());
    T.erase(std::unique(T.begin(), T.end()), T.end());

    // merge neighbouring atoms, closest pair first, then Newton-polish; empty result if no certificate
    auto finalize = [&](Candidate cur) -> std::optional<Candidate> {
        auto polished = [&](Candidate cand) -> std::optional<Candidate> {
            if (!newton_polish(f0, x0, c, st.t_max, cand.T, cand.A, cand.m)) return std::nullopt;
            cand.residual = residual_l2(f0, make_measure(cand.T, cand.A));
            cand.cert = certificate_search(f0, cand.T, cand.A, cand.m, x0, st.t_max, opt.grid_points);
            if (cand.cert.value < -tol) return std::nullopt;
            return cand;
        };
        bool merged = true;
        while (merged && cur.T.size() > 1) {
            merged = false;
            std::vector<std::size_t> order(cur.T.size() - 1);
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            auto gap = [&](std::size_t i) { return (cur.T[i + 1] - cur.T[i]) / (1.0 + cur.T[i]); };
            std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return gap(l) < gap(r); });
            for (std::size_t i : order) {
                if (gap(i) > 0.25) break;
                Candidate cand = cur;
                double a = cand.A[i] + cand.A[i + 1];
                cand.T[i] = cand.T[i] == 0.0 ? 0.0 : (cand.A[i] * cand.T[i] + cand.A[i + 1] * cand.T[i + 1]) / a;
                cand.A[i] = a;
                cand.T.erase(cand.T.begin() + i + 1);
                cand.A.erase(cand.A.begin() + i + 1);
                auto p = polished(cand);
                if (p && p->residual <= cur.residual * (1.0 + 1e-9)) {
                    cur = *p;
                    merged = true;
                    break;
                }
                if (gap(i) < opt.merge) {
                    cand.residual = residual_l2(f0, make_measure(cand.T, cand.A));
                    cur = cand;
                    merged = true;
                    break;
                }
            }
        }
        return polished(cur);
    };

    Candidate cur;
    for (int it = 1; it <= opt.max_outer; ++it) {
        QpResult q = weight_qp(f0, T, x0, c);
        double sum = 0.0;
        for (double a : q.a) sum += a;
        cur.T.clear();
        cur.A.clear();
        for (std::size_t j = 0; j < T.size(); ++j) {
            if (q.a[j] > opt.prune * sum) {
                cur.T.push_back(T[j]);
                cur.A.push_back(q.a[j]);
            }
        }
        cur.m = q.m;
        cur.residual = residual_l2(f0, make_measure(cur.T, cur.A));
        cur.cert = certificate_search(f0, cur.T, cur.A, cur.m, x0, st.t_max, opt.grid_points);
        st.history.push_back({it, cur.T.size(), cur.cert.value, cur.cert.t, cur.residual});
        st.iterations = it;
        if (opt.polish) {
            if (auto fin = finalize(cur)) {
                cur = *fin;
                st.converged = true;
                break;
            }
        }
        if (cur.cert.value >= -tol) {
            st.converged = true;
            break;
        }
        if (st.history.size() >= 3) {
            const auto& h1 = st.history[st.history.size() - 2];
            const auto& h2 = st.history[st.history.size() - 3];
            if (h1.residual_l2 <= cur.residual && h2.residual_l2 <= cur.residual) {
                st.diagnostics = "exchange iteration stalled";
                break;
            }
        }
        double tn = cur.cert.t;
        bool dup = false;
        for (double t : cur.T) dup = dup || std::abs(t - tn) <= 1e-14 * (1.0 + t);
        if (dup) {
            st.diagnostics = "certificate minimizer coincides with a support atom";
            break;
        }
        T = cur.T;
        T.push_back(tn);
        std::sort(T.begin(), T.end());
    }
    if (!st.converged && st.diagnostics.empty()) {
        std::ostringstream os;
        os << "no certificate after " << opt.max_outer << " outer iterations";
        st.diagnostics = os.str();
    }
    st.support = make_measure(cur.T, cur.A);
    st.m = cur.m;
    st.residual_l2 = cur.residual;
    st.cert_min = cur.cert.value;
    st.t_cert_min = cur.cert.t;
    if (st.converged) st.diagnostics.clear();
    return st;
}

SweepResult sweep_epsilon(const ReferenceF0& f0, double x0, double eps, const LocalOptions& opt) {
    if (!(eps > 0.0)) throw DomainError("sweep_epsilon: eps must be positive");
    double f0x = f0.value(x0);
    SweepResult out;
    out.eps = eps;
    auto tol = boost::math::tools::eps_tolerance<double>(48);

    // delta > 0, residual grows without bound
    {
        auto fn = [&](double ld) { return std::log(solve_local(f0, x0, std::exp(ld), opt).residual_l2 / eps); };
        double lo = std::log(eps * 0.05), hi = std::log(eps);
        std::vector<std::pair<double, double>> trace;
        double flo = fn(lo), fhi = fn(hi);
        trace.push_back({lo, flo});
        trace.push_back({hi, fhi});
        for (int k = 0; k < 60 && flo > 0.0; ++k) hi = lo, fhi = flo, lo -= 2.0, flo = fn(lo), trace.push_back({lo, flo});
        for (int k = 0; k < 60 && fhi < 0.0; ++k) lo = hi, flo = fhi, hi += 1.0, fhi = fn(hi), trace.push_back({hi, fhi});
        if (!(flo <= 0.0 && fhi >= 0.0)) throw BracketError("sweep_epsilon: no bracket for delta_plus", trace);
        std::uintmax_t iters = 100;
        auto r = boost::math::tools::toms748_solve(fn, lo, hi, flo, fhi, tol, iters);
        out.delta_plus = std::exp(0.5 * (r.first + r.second));
        out.plus = solve_local(f0, x0, out.delta_plus, opt);
    }
    // delta = -rho f0(x0), rho in (0, 1); the residual saturates at ||f0||_2
    {
        double sup = f0.l2_norm();
        if (eps >= sup) {
            std::ostringstream os;
            os << "sweep_epsilon: eps " << eps << " exceeds the reachable residual for delta < 0 (supremum "
               << sup << ")";
            throw BracketError(os.str(), {{1.0, sup}});
        }
        auto fn = [&](double ld) {
            double rho = std::exp(ld);
            return std::log(solve_local(f0, x0, -rho * f0x, opt).residual_l2 / eps);
        };
        double lo = std::log(std::min(0.5, 0.05 * eps / f0x)), hi = std::log1p(-1e-9);
        std::vector<std::pair<double, double>> trace;
        double flo = fn(lo);
        trace.push_back({lo, flo});
        for (int k = 0; k < 60 && flo > 0.0; ++k) lo -= 2.0, flo = fn(lo), trace.push_back({lo, flo});
        double fhi = fn(hi);
        trace.push_back({hi, fhi});
        if (!(flo <= 0.0 && fhi >= 0.0)) {
            std::ostringstream os;
            os << "sweep_epsilon: eps " << eps << " not reached for delta < 0 (supremum " << sup << ")";
            throw BracketError(os.str(), trace);
        }
        std::uintmax_t iters = 100;
        auto r = boost::math::tools::toms748_solve(fn, lo, hi, flo, fhi, tol, iters);
        out.delta_minus = -std::exp(0.5 * (r.first + r.second)) * f0x;
        out.minus = solve_local(f0, x0, out.delta_minus, opt);
    }
    out.M_eps = f0x + out.delta_plus;
    out.m_eps = f0x + out.delta_minus;
    return out;
}

}  // namespace cmx::local
