#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <boost/math/tools/roots.hpp>

#include "cmx/errors.hpp"
#include "cmx/local_caprini.hpp"
#include "cmx/quadrature.hpp"

namespace cmx::local {

namespace {

// g(u+s) - g(u) and g'(u+s) - g'(u) without cancellation for tiny s.
double dg(double u, double s) {
    double eu = std::exp(-u);
    return (-u * eu * std::expm1(-s) + s * std::expm1(-u)) / (u * (u + s));
}

double dg1(double u, double s) {
    // g'(u) = (e^{-u} - g(u))/u
    double h = std::exp(-u) - gram_g(u);
    double dh = std::exp(-u) * std::expm1(-s) - dg(u, s);
    return dh / (u + s) - h * s / (u * (u + s));
}

// b = 1 + beta and tau = 1 + s keep f* - e^{-x} accurate when delta is tiny.
struct PlusSolution {
    double a, beta, m;
    double dC;  // C_hat'(tau)
};

PlusSolution plus_system(double x0, double delta, double s) {
    double tau = 1.0 + s;
    double et = std::exp(-x0 * tau);
    Eigen::Matrix3d K;
    Eigen::Vector3d rhs;
    K << 1.0, gram_g(tau), -1.0,
         gram_g(tau), gram_g(2 * tau), -et,
         1.0, et, 0.0;
    rhs << -dg(1.0, s),
           -(dg(2.0, 2 * s) - dg(2.0, s)),
           delta - std::exp(-x0) * std::expm1(-x0 * s);
    Eigen::Vector3d v = K.fullPivLu().solve(rhs);
    PlusSolution p{v[0], v[1], v[2], 0.0};
    p.dC = p.a * gram_g1(tau) + p.beta * gram_g1(2 * tau) + (dg1(2.0, 2 * s) - dg1(2.0, s)) +
           x0 * p.m * et;
    return p;
}

struct MinusSolution {
    double beta, m_scaled;  // m e^{-x0 tau}
    double dC;
};

MinusSolution minus_system(double x0, double rho, double s) {
    double tau = 1.0 + s;
    MinusSolution p;
    p.beta = std::expm1(x0 * s + std::log1p(-rho));
    p.m_scaled = p.beta * gram_g(2 * tau) + (dg(2.0, 2 * s) - dg(2.0, s));
    p.dC = p.beta * gram_g1(2 * tau) + (dg1(2.0, 2 * s) - dg1(2.0, s)) + x0 * p.m_scaled;
    return p;
}

template <class Diff>
double diff_l2(Diff d) {
    static thread_local quad::Rule rule = quad::gauss_legendre(160, 0.0, 1.0);
    double r = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        double v = d(rule.x[i]);
        r += rule.w[i] * v * v;
    }
    return std::sqrt(r);
}

template <class F, class Valid>
double find_root(F f, Valid valid, double s_max, const char* what) {
    // tau = 1 + s scanned on both sides of 1, log-spaced in |s|
    std::vector<double> ls = quad::logspace(1e-200, s_max, 2000);
    std::vector<double> neg = quad::logspace(1e-200, 1.0 - 1e-9, 1500);
    std::vector<double> scan;
    for (double s : ls) scan.push_back(s);
    for (auto it = neg.begin(); it != neg.end(); ++it) scan.push_back(-*it);
    std::vector<std::pair<double, double>> trace;
    double prev_s = 0.0, prev_f = 0.0;
    bool have = false;
    for (std::size_t i = 0; i < scan.size(); ++i) {
        double s = scan[i];
        if (i == ls.size()) have = false;
        double v = f(s);
        trace.push_back({s, v});
        if (!std::isfinite(v) || !valid(s)) {
            have = false;
            continue;
        }
        if (have && ((prev_f <= 0.0) != (v <= 0.0))) {
            double sign = s > 0.0 ? 1.0 : -1.0;
            auto g = [&](double l) { return f(sign * std::exp(l)); };
            std::uintmax_t it = 200;
            double l1 = std::log(std::abs(prev_s)), l2 = std::log(std::abs(s));
            double f1 = prev_f, f2 = v;
            if (l1 > l2) std::swap(l1, l2), std::swap(f1, f2);
            auto r = boost::math::tools::toms748_solve(g, l1, l2, f1, f2,
                                                       boost::math::tools::eps_tolerance<double>(52), it);
            double root = sign * std::exp(0.5 * (r.first + r.second));
            if (valid(root)) return root;
        }
        prev_s = s, prev_f = v, have = true;
    }
    std::ostringstream os;
    os << what << ": tau-equation root not bracketed in (0, " << 1.0 + s_max << ")";
    throw BracketError(os.str(), trace);
}

}  // namespace

CapriniState exp_closed_form(double x0, double delta) {
    if (!(x0 >= 1.0) || !std::isfinite(x0)) throw DomainError("exp_closed_form: x0 must be >= 1");
    double f0x = std::exp(-x0);
    if (!(delta > -f0x) || delta == 0.0) throw DomainError("exp_closed_form: need delta in (-e^{-x0}, 0) or delta > 0");
    CapriniState st;
    st.f0 = ReferenceF0::exponential();
    st.x0 = x0;
    st.delta = delta;
    st.t_max = 50.0 + 10.0 * x0;
    double s_max = st.t_max - 1.0;
    if (delta > 0.0) {
        auto f = [&](double s) { return plus_system(x0, delta, s).dC; };
        auto valid = [&](double s) {
            PlusSolution p = plus_system(x0, delta, s);
            return p.a > 0.0 && p.beta > -1.0;
        };
        double s = find_root(f, valid, s_max, "exp_closed_form");
        PlusSolution p = plus_system(x0, delta, s);
        st.support = CmfMeasure({{0.0, p.a}, {1.0 + s, 1.0 + p.beta}});
        st.m = p.m;
        st.residual_l2 = diff_l2([&](double x) { return p.a + std::exp(-x) * (p.beta * std::exp(-x * s) + std::expm1(-x * s)); });
    } else {
        double rho = -delta / f0x;
        auto f = [&](double s) { return minus_system(x0, rho, s).dC; };
        auto valid = [&](double s) { return minus_system(x0, rho, s).beta > -1.0; };
        double s = find_root(f, valid, s_max, "exp_closed_form");
        MinusSolution p = minus_system(x0, rho, s);
        double tau = 1.0 + s;
        st.support = CmfMeasure({{tau, 1.0 + p.beta}});
        st.m = p.m_scaled * std::exp(x0 * tau);
        double lr = std::log1p(-rho);
        st.residual_l2 = diff_l2([&](double x) { return std::exp(-x) * std::expm1((x0 - x) * s + lr); });
    }
    st.converged = true;
    st.iterations = 0;
    st.cert_min = st.certificate_grid_min(4001);
    return st;
}

ESlopes e_slopes(double x0) {
    if (!(x0 >= 1.0)) throw DomainError("e_slopes: x0 must be >= 1");
    double h = 1e-6 * std::exp(-x0);
    auto E = [&](double d) { return std::abs(d) / exp_closed_form(x0, d).residual_l2; };
    ESlopes e;
    e.E_plus = 2.0 * E(h) - E(2 * h);
    e.E_minus = 2.0 * E(-h) - E(-2 * h);
    return e;
}

}  // namespace cmx::local
