#include "cmx/nnls.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace cmx {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const std::vector<int>& P) {
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(P.size()));
    for (std::size_t k = 0; k < P.size(); ++k) Ap.col(k) = A.col(P[k]);
    return Ap.colPivHouseholderQr().solve(b);
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, int max_iter) {
    const Eigen::Index n = A.cols();
    if (max_iter <= 0) max_iter = 3 * static_cast<int>(n) + 100;
    NnlsResult res;
    res.x = Eigen::VectorXd::Zero(n);
    std::vector<char> passive(n, 0);
    std::vector<int> P;
    Eigen::VectorXd w = A.transpose() * (b - A * res.x);
    int it = 0;
    while (it < max_iter) {
        // a gradient entry counts only above its own rounding level
        Eigen::VectorXd r = b - A * res.x;
        Eigen::VectorXd noise = 64.0 * std::numeric_limits<double>::epsilon() *
                                (A.cwiseAbs().transpose() * (r.cwiseAbs() + (A.cwiseAbs() * res.x.cwiseAbs())));
        Eigen::Index j = -1;
        double wmax = 0.0;
        for (Eigen::Index k = 0; k < n; ++k)
            if (!passive[k] && w[k] > noise[k] && w[k] > wmax) wmax = w[k], j = k;
        if (j < 0) {
            res.converged = true;
            break;
        }
        passive[j] = 1;
        P.push_back(static_cast<int>(j));
        while (it++ < max_iter) {
            Eigen::VectorXd z = solve_passive(A, b, P);
            bool positive = true;
            for (Eigen::Index k = 0; k < z.size(); ++k) positive = positive && z[k] > 0.0;
            if (positive) {
                for (std::size_t k = 0; k < P.size(); ++k) res.x[P[k]] = z[k];
                break;
            }
            double alpha = 1.0;
            for (std::size_t k = 0; k < P.size(); ++k) {
                if (z[k] <= 0.0) {
                    double xk = res.x[P[k]];
                    double r = xk / (xk - z[k]);
                    if (r < alpha) alpha = r;
                }
            }
            std::vector<int> keep;
            for (std::size_t k = 0; k < P.size(); ++k) {
                double& xk = res.x[P[k]];
                double before = xk;
                xk += alpha * (z[k] - before);
                if (xk > 1e-14 * before) {
                    keep.push_back(P[k]);
                } else {
                    xk = 0.0;
                    passive[P[k]] = 0;
                }
            }
            P = keep;
            if (P.empty()) break;
        }
        w = A.transpose() * (b - A * res.x);
    }
    res.iterations = it;
    res.residual_norm = (A * res.x - b).norm();
    return res;
}

}  // namespace cmx
