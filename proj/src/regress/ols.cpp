#include "bubblelab/regress/ols.hpp"

#include <cmath>
#include <cstdlib>

#include "bubblelab/errors.hpp"

namespace bubblelab::regress {

namespace {

std::string column_label(const std::vector<std::string>& names, Eigen::Index i) {
    if (i >= 0 && static_cast<std::size_t>(i) < names.size()) return names[static_cast<std::size_t>(i)];
    return "column " + std::to_string(i);
}

}  // namespace

OlsFit ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
           const std::vector<std::string>& column_names) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) {
        throw data_error("alignment", "response has " + std::to_string(y.size()) +
                                          " rows; design has " + std::to_string(n));
    }
    if (p < 1 || n <= p) {
        throw data_error("insufficient_observations",
                         "need more observations (" + std::to_string(n) + ") than regressors (" +
                             std::to_string(p) + ")");
    }

    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    const Eigen::MatrixXd r_full = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();

    // Rank / conditioning check on the R diagonal: a dependent column shows up
    // as a (near-)zero pivot relative to the largest one.
    double max_diag = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) max_diag = std::max(max_diag, std::abs(r_full(i, i)));
    if (max_diag == 0.0) {
        throw numeric_error("singular_design", "design matrix is identically zero");
    }
    std::string offenders;
    for (Eigen::Index i = 0; i < p; ++i) {
        if (std::abs(r_full(i, i)) * 1e12 < max_diag) {
            if (!offenders.empty()) offenders += ", ";
            offenders += column_label(column_names, i);
        }
    }
    if (!offenders.empty()) {
        throw numeric_error("singular_design",
                            "design matrix is rank deficient (condition above 1e12); dependent: " +
                                offenders);
    }

    OlsFit fit;
    fit.coefficients = qr.solve(y);
    fit.residuals = y - X * fit.coefficients;
    fit.nobs = static_cast<std::size_t>(n);

    const double rss = fit.residuals.squaredNorm();
    fit.sigma2 = rss / static_cast<double>(n - p);

    // (X'X)^{-1} = R^{-1} R^{-T} from the already-computed factor.
    const Eigen::MatrixXd r_inv =
        r_full.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
    fit.xtx_inverse = r_inv * r_inv.transpose();

    fit.stderr_classical = (fit.sigma2 * fit.xtx_inverse.diagonal().array()).cwiseMax(0.0).sqrt();

    const double ybar = y.mean();
    const double tss = (y.array() - ybar).matrix().squaredNorm();
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;
    return fit;
}

Eigen::VectorXd newey_west_se(const OlsFit& fit, const Eigen::MatrixXd& X, std::size_t bandwidth) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (fit.residuals.size() != n || fit.xtx_inverse.rows() != p) {
        throw data_error("alignment", "fit does not match the supplied design matrix");
    }
    if (bandwidth >= static_cast<std::size_t>(n)) {
        throw data_error("invalid_bandwidth", "bandwidth " + std::to_string(bandwidth) +
                                                  " must be below nobs " + std::to_string(n));
    }

    const Eigen::VectorXd& e = fit.residuals;
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index t = 0; t < n; ++t) {
        omega.noalias() += e(t) * e(t) * X.row(t).transpose() * X.row(t);
    }
    for (std::size_t j = 1; j <= bandwidth; ++j) {
        const double w = 1.0 - static_cast<double>(j) / (static_cast<double>(bandwidth) + 1.0);
        const auto lag = static_cast<Eigen::Index>(j);
        for (Eigen::Index t = lag; t < n; ++t) {
            const Eigen::MatrixXd cross = X.row(t).transpose() * X.row(t - lag);
            omega.noalias() += w * e(t) * e(t - lag) * (cross + cross.transpose());
        }
    }

    const Eigen::MatrixXd cov = fit.xtx_inverse * omega * fit.xtx_inverse;
    return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

}  // namespace bubblelab::regress
