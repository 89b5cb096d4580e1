#include "bubblelab/coint/engle_granger.hpp"

#include <array>
#include <string>

#include "bubblelab/errors.hpp"

namespace bubblelab::coint {

namespace {

struct CvRow {
    double cv_1, cv_5, cv_10;
};

/// Asymptotic no-cointegration critical values for a residual-based ADF test
/// with a first-stage intercept (MacKinnon response-surface values), indexed
/// by the number of variables in the relation (dependent included).
constexpr std::array<CvRow, 4> kResidualAdfCvs = {{
    {-3.90, -3.34, -3.04},  // 2 variables
    {-4.29, -3.74, -3.45},  // 3
    {-4.64, -4.10, -3.81},  // 4
    {-4.96, -4.42, -4.13},  // 5
}};

}  // namespace

EngleGrangerResult engle_granger(const TimeSeries& residuals, std::size_t lag_K,
                                 std::size_t n_variables) {
    if (n_variables < 2 || n_variables > 5) {
        throw usage_error("unsupported_dimension",
                          "critical values cover relations of 2..5 variables, not " +
                              std::to_string(n_variables));
    }
    residuals.require_valid(2 * lag_K + 4);

    EngleGrangerResult out;
    out.adf = regress::adf_t_stat(residuals, 0, residuals.size() - 1, lag_K,
                                  /*include_intercept=*/false);
    out.n_variables = n_variables;
    const CvRow& row = kResidualAdfCvs[n_variables - 2];
    out.cv_1 = row.cv_1;
    out.cv_5 = row.cv_5;
    out.cv_10 = row.cv_10;
    out.reject_1 = out.adf.t_stat < out.cv_1;
    out.reject_5 = out.adf.t_stat < out.cv_5;
    out.reject_10 = out.adf.t_stat < out.cv_10;
    out.reject_flat = out.adf.t_stat < out.flat_threshold;
    return out;
}

}  // namespace bubblelab::coint
