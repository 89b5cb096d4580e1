#include "bubblelab/dgp/var_loading.hpp"

#include <cmath>
#include <cstddef>

#include "bubblelab/errors.hpp"

namespace bubblelab::dgp {

namespace {

/// Spectral-radius estimate by power iteration. The growth rate ||A v_k|| of
/// the normalized iterates oscillates when the dominant eigenvalues are a
/// complex pair, so the estimate averages log growth over a trailing window,
/// which converges to log(radius) for any dominant structure.
double spectral_radius(const Eigen::MatrixXd& A, double tolerance) {
    const Eigen::Index n = A.rows();
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 / static_cast<double>(i + 1);
    v.normalize();

    constexpr std::size_t kWindow = 64;
    constexpr std::size_t kMaxIters = 20000;
    double window_sum = 0.0;
    std::size_t window_count = 0;
    double previous_estimate = -1.0;
    double estimate = 0.0;
    for (std::size_t k = 1; k <= kMaxIters; ++k) {
        const Eigen::VectorXd w = A * v;
        const double growth = w.norm();
        if (growth == 0.0) return 0.0;
        v = w / growth;
        window_sum += std::log(growth);
        if (++window_count == kWindow) {
            estimate = std::exp(window_sum / static_cast<double>(kWindow));
            window_sum = 0.0;
            window_count = 0;
            if (previous_estimate >= 0.0 && std::abs(estimate - previous_estimate) < tolerance) {
                return estimate;
            }
            previous_estimate = estimate;
        }
    }
    return estimate;
}

}  // namespace

Eigen::VectorXd var_technology_loading(const Eigen::MatrixXd& Phi, const Eigen::VectorXd& gamma,
                                       double rho) {
    if (Phi.rows() != Phi.cols() || Phi.rows() == 0 || gamma.size() != Phi.rows()) {
        throw usage_error("invalid_config", "Phi must be square and conformable with gamma");
    }
    if (!(rho > 0.0) || !(rho < 1.0)) {
        throw usage_error("invalid_config", "discount factor rho must lie in (0, 1)");
    }
    const Eigen::MatrixXd discounted = rho * Phi;
    const double radius = spectral_radius(discounted, 1e-8);
    if (radius >= 1.0) {
        throw numeric_error("nonconvergent_series",
                            "spectral radius of rho * Phi is " + std::to_string(radius) +
                                "; the discounted VAR series does not converge");
    }
    const Eigen::MatrixXd lhs =
        (Eigen::MatrixXd::Identity(Phi.rows(), Phi.cols()) - discounted).transpose();
    return lhs.partialPivLu().solve(Phi.transpose() * gamma);
}

}  // namespace bubblelab::dgp
