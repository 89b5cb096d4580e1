#include "bubblelab/coint/pca.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "bubblelab/errors.hpp"

namespace bubblelab::coint {

PcaResult pca(const Frame& gaps, bool standardize) {
    gaps.require_valid();
    const std::size_t m = gaps.n_cols();
    const std::size_t n = gaps.n_rows();
    if (m < 2) {
        throw usage_error("invalid_config", "principal components need at least two series");
    }
    if (n < m + 1) {
        throw data_error("insufficient_sample", std::to_string(n) + " rows cannot identify " +
                                                    std::to_string(m) + " components");
    }

    Eigen::MatrixXd Z(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        const auto& col = gaps.column_at(k);
        double mu = 0.0;
        for (const double v : col) mu += v;
        mu /= static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
            Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = col[i] - mu;
        }
        if (standardize) {
            const double sd = std::sqrt(
                Z.col(static_cast<Eigen::Index>(k)).squaredNorm() / (static_cast<double>(n) - 1.0));
            if (!(sd > 0.0) || !std::isfinite(sd)) {
                throw numeric_error("degenerate_covariance",
                                    "column " + gaps.name_at(k) +
                                        " has zero variance; correlation undefined");
            }
            Z.col(static_cast<Eigen::Index>(k)) /= sd;
        }
    }

    const Eigen::MatrixXd cov = (Z.transpose() * Z) / (static_cast<double>(n) - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
        throw numeric_error("degenerate_covariance", "eigendecomposition did not converge");
    }

    double total = 0.0;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
        total += std::max(eig.eigenvalues()(k), 0.0);
    }
    if (!(total > 0.0)) {
        throw numeric_error("degenerate_covariance", "panel has no variance");
    }

    PcaResult out;
    out.series_names = gaps.names();
    out.loadings.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    out.variance_explained.resize(m);
    out.scores.set_start_index(gaps.start_index());

    // Eigen returns eigenvalues in ascending order; report descending.
    for (std::size_t c = 0; c < m; ++c) {
        const auto src = static_cast<Eigen::Index>(m - 1 - c);
        Eigen::VectorXd v = eig.eigenvectors().col(src);
        Eigen::Index arg_max = 0;
        v.cwiseAbs().maxCoeff(&arg_max);
        if (v(arg_max) < 0.0) v = -v;
        out.loadings.row(static_cast<Eigen::Index>(c)) = v.transpose();
        out.variance_explained[c] = std::max(eig.eigenvalues()(src), 0.0) / total;

        const Eigen::VectorXd score = Z * v;
        std::vector<double> col(n);
        for (std::size_t i = 0; i < n; ++i) col[i] = score(static_cast<Eigen::Index>(i));
        out.scores.add_column("pc" + std::to_string(c + 1), std::move(col));
    }
    return out;
}

}  // namespace bubblelab::coint
