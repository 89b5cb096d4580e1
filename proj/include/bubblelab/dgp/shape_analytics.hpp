#pragma once

/// Deterministic functionals of a shock shape expressed in sample fractions
/// r in [0, 1]: the integrated shape, its least-squares linear detrend, and
/// the window drift ratio that governs the sign of a first-order
/// autoregressive fit to a deterministic convex path.

#include <cstddef>
#include <functional>
#include <vector>

namespace bubblelab::dgp {

/// Grids share the uniform partition of [0, 1] in `grid`.
struct ShapeAnalytics {
    std::vector<double> grid;        ///< r_i = i / n, i = 0..n
    std::vector<double> integrated;  ///< G(r) = integral of the shape from 0 to r
    std::vector<double> detrended;   ///< G minus its L2-best affine fit on [0, 1]
    double drift_ratio = 0.0;        ///< B(r1, r2); see below
};

/// Computes, by composite Simpson integration on at least `n_intervals`
/// uniform subintervals (floored at 2000, rounded up to an even count):
///
///  - integrated:  G(r) = int_0^r h(s) ds on the grid;
///  - detrended:   G minus argmin_{a,b} int_0^1 [G(r) - a - b r]^2 dr, using
///                 a = 4 int G - 6 int r G and b = -6 int G + 12 int r G;
///  - drift_ratio: B(r1, r2) = int_w q~ q' dr / int_w q~^2 dr, where q is the
///                 input function itself, q~ is q minus its mean over the
///                 window w = [r1, r2], and the numerator is evaluated through
///                 the exact integration-by-parts identity
///                 int_w q~ q' dr = (q~(r2)^2 - q~(r1)^2) / 2.
///
/// B is positive for a strictly convex increasing q on the window, and zero
/// for an affine q (demeaning kills a linear trend). When q is constant on
/// the window the ratio is 0/0 and NaN is returned. Callers probing the
/// price-dividend theory pass the present-value shape as q.
///
/// Requires 0 <= r1 < r2 <= 1 with a non-degenerate window; violations throw
/// usage_error("degenerate_window").
[[nodiscard]] ShapeAnalytics shape_analytics(const std::function<double(double)>& h, double r1,
                                             double r2, std::size_t n_intervals = 2000);

}  // namespace bubblelab::dgp
