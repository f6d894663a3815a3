#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <numbers>
#include <tuple>

#include "cmx/errors.hpp"
#include "cmx/phi_solver.hpp"

namespace cmx::phi {

double hp_norm(const CmfMeasure& f, double p, double* abs_error) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("hp_norm: p must be >= 1");
    if (f.empty()) return 0.0;
    if (p == 1.0) {
        // on the imaginary axis |f(iw)|^2 is a cosine sum with 1/(1+w^2) decay only
        boost::math::quadrature::ooura_fourier_cos<double> cosint;
        auto kernel = [](double w) { return 1.0 / (1.0 + w * w); };
        const auto& at = f.atoms();
        double val = 0.0, err = 0.0;
        for (std::size_t j = 0; j < at.size(); ++j)
            for (std::size_t k = 0; k < at.size(); ++k) {
                double c = std::abs(at[j].t - at[k].t);
                double v = std::numbers::pi / 2.0, r = 0.0;
                if (c > 0.0) std::tie(v, r) = cosint.integrate(kernel, c);
                val += at[j].a * at[k].a * v;
                err += std::abs(at[j].a * at[k].a * v) * r;
            }
        if (!std::isfinite(val) || err > 1e-8 * std::abs(val))
            throw QuadratureError("hp_norm: cosine integral did not converge", err / std::max(std::abs(val), 1e-300));
        if (abs_error) *abs_error = err / (2.0 * std::sqrt(std::max(val, 1e-300)) * std::sqrt(std::numbers::pi));
        return std::sqrt(val / std::numbers::pi);
    }
    double theta = std::numbers::pi / (2.0 * p);
    double ap = std::cos(theta);
    cplx rot = std::polar(1.0, theta);
    auto integrand = [&](double w) {
        double v = std::norm(f(w * rot));
        return v / (w * w + 1.0 + 2.0 * ap * w);
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0, l1 = 0.0;
    double val = integrator.integrate(integrand, 1e-12, &err, &l1);
    if (!std::isfinite(val) || err > 1e-8 * std::max(l1, 1e-300))
        throw QuadratureError("hp_norm: integral did not converge", err / std::max(val, 1e-300));
    if (abs_error) *abs_error = std::sqrt(p / std::numbers::pi) * err / (2.0 * std::sqrt(std::max(val, 1e-300)));
    return std::sqrt(p / std::numbers::pi * val);
}

double hp_constant(double p) {
    if (!(p > 1.0)) throw DomainError("hp_constant: p must be > 1");
    double ap = std::cos(std::numbers::pi / (2.0 * p));
    return std::sqrt(p / (std::numbers::pi * ap) + std::numbers::pi * p * ap / 6.0);
}

double hp_reverse_constant(double p) {
    if (!(p >= 1.0)) throw DomainError("hp_reverse_constant: p must be >= 1");
    return 2.0 * std::sqrt(2.0 * std::numbers::pi / p);
}

}  // namespace cmx::phi
