#include "cmx/cmf.hpp"

#include <algorithm>
#include <cmath>

#include "cmx/errors.hpp"

namespace cmx {

namespace {

// sum_{k>=d} k!/(k-d)! (-s)^{k-d} (-1)^d / (k+1)!, the d-th derivative of g.
double g_series(double s, int d) {
    double sum = 0.0;
    double sp = 1.0;  // s^{k-d}
    double fact = 1.0;  // (k+1)!
    for (int k = 0; k <= 40; ++k) {
        fact *= (k + 1);
        if (k < d) continue;
        double falling = 1.0;
        for (int j = 0; j < d; ++j) falling *= (k - j);
        double term = ((k % 2) ? -1.0 : 1.0) * falling * sp / fact;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) && k > d + 2) break;
        sp *= s;
    }
    return sum;
}

}  // namespace

double gram_g(double s) {
    if (s < 1e-3) return g_series(s, 0);
    return -std::expm1(-s) / s;
}

double gram_g1(double s) {
    if (s < 1.0) return g_series(s, 1);
    return (s * std::exp(-s) + std::expm1(-s)) / (s * s);
}

double gram_g2(double s) {
    if (s < 1.0) return g_series(s, 2);
    double e = std::exp(-s);
    return -e / s - 2.0 * e / (s * s) - 2.0 * std::expm1(-s) / (s * s * s);
}

CmfMeasure::CmfMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    for (const Atom& at : atoms_) {
        if (!(at.t >= 0.0) || !std::isfinite(at.t)) throw DomainError("CmfMeasure: atom location must be >= 0");
        if (!(at.a > 0.0) || !std::isfinite(at.a)) throw DomainError("CmfMeasure: atom weight must be > 0");
    }
    std::sort(atoms_.begin(), atoms_.end(), [](const Atom& l, const Atom& r) { return l.t < r.t; });
    for (std::size_t i = 1; i < atoms_.size(); ++i) {
        if (atoms_[i].t == atoms_[i - 1].t) throw DomainError("CmfMeasure: atom locations must be distinct");
    }
}

double CmfMeasure::operator()(double x) const {
    double s = 0.0;
    for (const Atom& at : atoms_) s += at.a * std::exp(-x * at.t);
    return s;
}

std::complex<double> CmfMeasure::operator()(std::complex<double> z) const {
    std::complex<double> s = 0.0;
    for (const Atom& at : atoms_) s += at.a * std::exp(-z * at.t);
    return s;
}

double CmfMeasure::moment(double t) const {
    double s = 0.0;
    for (const Atom& at : atoms_) s += at.a * gram_g(t + at.t);
    return s;
}

double CmfMeasure::moment_d1(double t) const {
    double s = 0.0;
    for (const Atom& at : atoms_) s += at.a * gram_g1(t + at.t);
    return s;
}

double CmfMeasure::moment_d2(double t) const {
    double s = 0.0;
    for (const Atom& at : atoms_) s += at.a * gram_g2(t + at.t);
    return s;
}

double CmfMeasure::l2_norm_sq() const {
    double s = 0.0;
    for (const Atom& p : atoms_)
        for (const Atom& q : atoms_) s += p.a * q.a * gram_g(p.t + q.t);
    return s;
}

double CmfMeasure::l2_norm() const { return std::sqrt(l2_norm_sq()); }

double CmfMeasure::star_norm() const {
    double s = 0.0;
    for (const Atom& at : atoms_) s += at.a / (at.t + 1.0);
    return s;
}

double CmfMeasure::total_mass() const {
    double s = 0.0;
    for (const Atom& at : atoms_) s += at.a;
    return s;
}

}  // namespace cmx
