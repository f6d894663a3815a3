#include "cmx/operator_k.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "cmx/errors.hpp"
#include "cmx/special_fn.hpp"

namespace cmx::opk {

UnitGridFunction UnitGridFunction::sample(const quad::Rule& rule, const std::function<double(double)>& f) {
    UnitGridFunction g;
    g.nodes = rule.x;
    g.weights = rule.w;
    g.values.resize(rule.x.size());
    for (std::size_t i = 0; i < rule.x.size(); ++i) g.values[i] = f(rule.x[i]);
    return g;
}

UnitGridFunction UnitGridFunction::gauss_legendre(int n, const std::function<double(double)>& f) {
    return sample(quad::gauss_legendre(n, 0.0, 1.0), f);
}

UnitGridFunction UnitGridFunction::log_gauss_legendre(int n, double s_max, const std::function<double(double)>& f) {
    return sample(quad::log_gauss_legendre(n, s_max), f);
}

double UnitGridFunction::l2_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < size(); ++i) s += weights[i] * values[i] * values[i];
    return std::sqrt(s);
}

void UnitGridFunction::validate() const {
    if (nodes.size() != weights.size() || nodes.size() != values.size() || nodes.empty())
        throw DomainError("UnitGridFunction: inconsistent sizes");
    double wsum = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (!(nodes[i] > 0.0 && nodes[i] < 1.0)) throw DomainError("UnitGridFunction: nodes must lie in (0,1)");
        if (i > 0 && !(nodes[i] > nodes[i - 1])) throw DomainError("UnitGridFunction: nodes must increase");
        if (!(weights[i] > 0.0)) throw DomainError("UnitGridFunction: weights must be positive");
        wsum += weights[i];
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw DomainError("UnitGridFunction: weights must sum to 1");
}

double apply_K(const UnitGridFunction& f, double x) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f.weights[j] * f.values[j] / (x + f.nodes[j]);
    return s;
}

cplx apply_K(const UnitGridFunction& f, cplx z) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f.weights[j] * f.values[j] / (z + f.nodes[j]);
    return s;
}

double apply_Lambda(const UnitGridFunction& f, double t) {
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += f.weights[j] * f.values[j] * std::exp(-f.nodes[j] * t);
    return s;
}

std::vector<double> apply_K_at_nodes(const UnitGridFunction& f) {
    std::vector<double> out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = apply_K(f, f.nodes[i]);
    return out;
}

double gram_form(const UnitGridFunction& f, const UnitGridFunction& g) {
    std::vector<double> kg = apply_K_at_nodes(g);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.weights[i] * f.values[i] * kg[i];
    return s;
}

MuGrid MuGrid::uniform(double mu_max, double step) {
    if (!(mu_max > 0.0) || !(step > 0.0)) throw DomainError("MuGrid: mu_max and step must be positive");
    int n = static_cast<int>(std::ceil(mu_max / step - 1e-9));
    if (n % 2) ++n;
    if (n < 2) n = 2;
    MuGrid g;
    g.step = step;
    g.mu_max = n * step;
    g.mu.resize(n + 1);
    for (int i = 0; i <= n; ++i) g.mu[i] = i * step;
    g.weights = quad::simpson_weights(n, step);
    return g;
}

EigenTable eigen_table(const std::vector<double>& xs, const MuGrid& grid) {
    EigenTable t;
    t.x = xs;
    t.u.reserve(xs.size());
    for (double x : xs) t.u.push_back(special::eigfun_u_exact_table(x, grid.mu));
    return t;
}

namespace {

double spectral_density(double mu) { return mu * std::tanh(std::numbers::pi * mu); }

}  // namespace

UTransform u_forward(const UnitGridFunction& f, const MuGrid& grid, double tail_tol) {
    UTransform tf;
    tf.grid = grid;
    auto table = std::make_shared<EigenTable>(eigen_table(f.nodes, grid));
    tf.coefficients.assign(grid.mu.size(), 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double wf = f.weights[i] * f.values[i];
        const std::vector<double>& row = table->u[i];
        for (std::size_t k = 0; k < grid.mu.size(); ++k) tf.coefficients[k] += wf * row[k];
    }
    tf.table = table;
    double l2 = f.l2_norm();
    tf.l2_norm_sq = l2 * l2;
    double last = tf.coefficients.back();
    tf.tail_estimate = tf.l2_norm_sq > 0.0 ? last * last * grid.mu_max / tf.l2_norm_sq : 0.0;
    if (tf.tail_estimate > tail_tol) {
        tf.tail_warning = true;
        std::ostringstream os;
        os << "u_forward: tail estimate " << tf.tail_estimate << " exceeds " << tail_tol << " at mu_max "
           << grid.mu_max;
        tf.warning = os.str();
    }
    return tf;
}

UTransform u_forward(const UnitGridFunction& f, const TransformOptions& opt) {
    return u_forward(f, MuGrid::uniform(opt.mu_max, opt.step), opt.tail_tol);
}

double u_inverse(const UTransform& tf, double x) {
    if (!(x > 0.0 && x <= 1.0)) throw DomainError("u_inverse: x must lie in (0,1]");
    const std::vector<double>* row = nullptr;
    std::vector<double> local;
    if (tf.table) {
        auto it = std::find(tf.table->x.begin(), tf.table->x.end(), x);
        if (it != tf.table->x.end()) row = &tf.table->u[it - tf.table->x.begin()];
    }
    if (!row) {
        local = special::eigfun_u_exact_table(x, tf.grid.mu);
        row = &local;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < tf.grid.mu.size(); ++k)
        s += tf.grid.weights[k] * tf.coefficients[k] * (*row)[k] * spectral_density(tf.grid.mu[k]);
    return s;
}

double plancherel_sum(const UTransform& tf) {
    double s = 0.0;
    for (std::size_t k = 0; k < tf.grid.mu.size(); ++k)
        s += tf.grid.weights[k] * tf.coefficients[k] * tf.coefficients[k] * spectral_density(tf.grid.mu[k]);
    return s;
}

double diffop_L_residual(double mu, const std::vector<double>& x_probe, double h) {
    if (!(mu >= 0.0)) throw DomainError("diffop_L_residual: mu must be >= 0");
    double lambda = mu * mu + 0.25;
    double worst = 0.0;
    for (double x : x_probe) {
        if (!(x - 2 * h > 0.0 && x + 2 * h < 1.0)) throw DomainError("diffop_L_residual: probe too close to an endpoint");
        double u0 = special::eigfun_u(x, mu);
        double up1 = special::eigfun_u(x + h, mu), um1 = special::eigfun_u(x - h, mu);
        double up2 = special::eigfun_u(x + 2 * h, mu), um2 = special::eigfun_u(x - 2 * h, mu);
        double d1h = (up1 - um1) / (2 * h), d1H = (up2 - um2) / (4 * h);
        double d2h = (up1 - 2 * u0 + um1) / (h * h), d2H = (up2 - 2 * u0 + um2) / (4 * h * h);
        double d1 = (4 * d1h - d1H) / 3, d2 = (4 * d2h - d2H) / 3;
        double p = x * x * (1 - x * x), dp = 2 * x - 4 * x * x * x;
        double Lu = -(p * d2 + dp * d1) + 2 * x * x * u0;
        worst = std::max(worst, std::abs(Lu - lambda * u0) / std::abs(u0));
    }
    return worst;
}

double eigen_relation_residual(double mu, int n, int n_fine, double s_max) {
    quad::Rule rule = quad::gauss_legendre(n);
    UnitGridFunction u =
        UnitGridFunction::log_gauss_legendre(n_fine, s_max, [mu](double x) { return special::eigfun_u(x, mu); });
    double nu = special::eigenvalue_nu(mu);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < n; ++i) {
        double ui = special::eigfun_u(rule.x[i], mu);
        double r = apply_K(u, rule.x[i]) - nu * ui;
        num += rule.w[i] * r * r;
        den += rule.w[i] * ui * ui;
    }
    return std::sqrt(num / den);
}

}  // namespace cmx::opk
