#pragma once

/// Present-value loading of a VAR state. When the shock is a linear read-out
/// delta_t = gamma' X_t of a stable VAR X_{t+1} = Phi X_t + w_{t+1}, the
/// discounted present value of future shocks is the linear function beta' X_t
/// with beta solving (I - rho Phi)' beta = Phi' gamma.

#include <Eigen/Dense>

namespace bubblelab::dgp {

/// Solves (I - rho Phi)' beta = Phi' gamma.
///
/// Requires the spectral radius of rho * Phi to be below one so the geometric
/// series converges; the radius is estimated by power iteration (windowed
/// growth-rate estimate, tolerance 1e-8) and a violation throws
/// numeric_error("nonconvergent_series"). Dimension mismatches throw
/// usage_error("invalid_config").
[[nodiscard]] Eigen::VectorXd var_technology_loading(const Eigen::MatrixXd& Phi,
                                                     const Eigen::VectorXd& gamma, double rho);

}  // namespace bubblelab::dgp
