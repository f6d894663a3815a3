#pragma once

#include <complex>
#include <vector>

namespace cmx {

// g(s) = (1 - e^{-s})/s with g(0) = 1, the Gram entry of two exponentials on [0,1].
double gram_g(double s);
double gram_g1(double s);  // g'(s)
double gram_g2(double s);  // g''(s)

struct Atom {
    double t;
    double a;
};

// f(x) = sum_j a_j exp(-x t_j), a_j > 0, t_j >= 0 sorted and distinct.
class CmfMeasure {
public:
    CmfMeasure() = default;
    explicit CmfMeasure(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    double operator()(double x) const;
    std::complex<double> operator()(std::complex<double> z) const;

    // (Lambda f)(t) = int_0^1 f(x) e^{-xt} dx and its t-derivatives.
    double moment(double t) const;
    double moment_d1(double t) const;
    double moment_d2(double t) const;

    double l2_norm_sq() const;
    double l2_norm() const;
    double star_norm() const;  // sum a_j/(t_j+1)
    double total_mass() const;

private:
    std::vector<Atom> atoms_;
};

}  // namespace cmx
