#include "bubblelab/core/detrend.hpp"

#include <cstddef>

#include "bubblelab/errors.hpp"

namespace bubblelab {

TimeSeries detrend_linear(const TimeSeries& y) {
    y.require_valid(3);
    const std::size_t n = y.size();

    // Two-regressor normal equations in centered form: with t = 0..n-1,
    // slope = S_ty / S_tt around the means, intercept = ybar - slope * tbar.
    // Centering keeps the solve exact for any start_index.
    const double tbar = 0.5 * static_cast<double>(n - 1);
    double ybar = 0.0;
    for (double v : y.values) ybar += v;
    ybar /= static_cast<double>(n);

    double s_tt = 0.0;
    double s_ty = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = static_cast<double>(i) - tbar;
        s_tt += dt * dt;
        s_ty += dt * (y.values[i] - ybar);
    }
    const double slope = s_ty / s_tt;

    TimeSeries out = y;
    for (std::size_t i = 0; i < n; ++i) {
        const double fitted = ybar + slope * (static_cast<double>(i) - tbar);
        out.values[i] = y.values[i] - fitted;
    }
    return out;
}

}  // namespace bubblelab
