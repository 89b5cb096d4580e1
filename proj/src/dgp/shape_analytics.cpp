#include "bubblelab/dgp/shape_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bubblelab/errors.hpp"

namespace bubblelab::dgp {

namespace {

/// Composite Simpson integral of f over [lo, hi] on n uniform subintervals,
/// each evaluated with its midpoint (error O(h^4) without requiring n even).
double simpson(const std::function<double(double)>& f, double lo, double hi, std::size_t n) {
    const double h = (hi - lo) / static_cast<double>(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = lo + h * static_cast<double>(i);
        const double b = a + h;
        sum += (h / 6.0) * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
    }
    return sum;
}

}  // namespace

ShapeAnalytics shape_analytics(const std::function<double(double)>& h, double r1, double r2,
                               std::size_t n_intervals) {
    if (!(r1 >= 0.0) || !(r2 <= 1.0) || !(r1 < r2) || r2 - r1 < 1e-6) {
        throw usage_error("degenerate_window",
                          "the window [r1, r2] must be a non-degenerate subinterval of [0, 1]");
    }
    std::size_t n = std::max<std::size_t>(n_intervals, 2000);
    if (n % 2 != 0) ++n;

    ShapeAnalytics out;
    out.grid.resize(n + 1);
    out.integrated.resize(n + 1);
    const double dr = 1.0 / static_cast<double>(n);
    out.grid[0] = 0.0;
    out.integrated[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = dr * static_cast<double>(i);
        const double b = dr * static_cast<double>(i + 1);
        out.grid[i + 1] = b;
        out.integrated[i + 1] =
            out.integrated[i] + (dr / 6.0) * (h(a) + 4.0 * h(0.5 * (a + b)) + h(b));
    }

    // L2-best affine fit to G on [0, 1]: projection onto span{1, r}.
    auto grid_value = [&](double r) {
        // G is piecewise-smooth on the uniform grid; linear interpolation is
        // ample for the two moment integrals below.
        const double pos = r / dr;
        const auto lo = static_cast<std::size_t>(pos);
        if (lo >= n) return out.integrated[n];
        const double w = pos - static_cast<double>(lo);
        return (1.0 - w) * out.integrated[lo] + w * out.integrated[lo + 1];
    };
    const double m0 = simpson(grid_value, 0.0, 1.0, n);
    const double m1 = simpson([&](double r) { return r * grid_value(r); }, 0.0, 1.0, n);
    const double a = 4.0 * m0 - 6.0 * m1;
    const double b = -6.0 * m0 + 12.0 * m1;
    out.detrended.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        out.detrended[i] = out.integrated[i] - a - b * out.grid[i];
    }

    // Window drift ratio on [r1, r2], treating the input as q directly.
    const double window = r2 - r1;
    const double mean = simpson(h, r1, r2, n) / window;
    auto centered_sq = [&](double r) {
        const double q = h(r) - mean;
        return q * q;
    };
    const double denominator = simpson(centered_sq, r1, r2, n);
    const double q1 = h(r1) - mean;
    const double q2 = h(r2) - mean;
    const double numerator = 0.5 * (q2 * q2 - q1 * q1);
    out.drift_ratio = denominator > 0.0 ? numerator / denominator
                                        : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace bubblelab::dgp
