#pragma once

#include <vector>

namespace rotorlab {

struct OlsResult {
    std::vector<double> coefficients;
    double residual_rms = 0.0;
    // max over columns of |<residual, col>| / (||col|| * ||y||), 0 when y = 0
    double orthogonality = 0.0;
    double condition_estimate = 0.0; // of the column-scaled regressor matrix
    bool used_qr_fallback = false;
};

// Ordinary least squares for a dense column-major regressor set. Columns are
// rescaled to unit norm internally; the primary path solves the normal
// equations by Cholesky and a pivoted Householder QR takes over when the
// scaled condition estimate exceeds cond_limit. Throws NumericError
// "rank-deficient" when the regressors do not have full column rank.
OlsResult ols_fit(const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
                  double cond_limit = 1e8);

} // namespace rotorlab
