#include "bubblelab/core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "bubblelab/errors.hpp"

namespace bubblelab {

double mean(const std::vector<double>& x) {
    if (x.empty()) throw data_error("degenerate_input", "mean of empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
    if (x.size() < 2) throw data_error("degenerate_input", "variance needs at least 2 points");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double quantile_type7(std::vector<double> x, double q) {
    if (x.empty()) throw data_error("degenerate_input", "quantile of empty sample");
    if (!(q >= 0.0 && q <= 1.0)) {
        throw data_error("degenerate_input", "quantile level must lie in [0,1]");
    }
    std::sort(x.begin(), x.end());
    const double h = (static_cast<double>(x.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= x.size()) return x.back();
    const double frac = h - std::floor(h);
    return x[lo] + frac * (x[lo + 1] - x[lo]);
}

}  // namespace bubblelab
