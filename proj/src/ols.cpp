#include "rotorlab/ols.hpp"

#include "rotorlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rotorlab {

namespace {

// Symmetric eigenvalue bounds of a small SPD matrix via Gershgorin-refined
// power iteration; only used as a condition estimate.
double power_iteration(const std::vector<std::vector<double>>& m, int iters) {
    const std::size_t n = m.size();
    // deterministic start with overlap in every eigen-direction
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + std::sin(0.7 * static_cast<double>(i + 1));
    double lambda = 0.0;
    for (int it = 0; it < iters; ++it) {
        std::vector<double> w(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) w[i] += m[i][j] * v[j];
        lambda = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        if (lambda <= 0.0) return 0.0;
        for (double& x : w) x /= lambda;
        v = std::move(w);
    }
    return lambda;
}

bool cholesky_solve(std::vector<std::vector<double>> a, std::vector<double> b,
                    std::vector<double>& x) {
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        double d = a[k][k];
        for (std::size_t j = 0; j < k; ++j) d -= a[k][j] * a[k][j];
        if (!(d > 0.0)) return false;
        a[k][k] = std::sqrt(d);
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = a[i][k];
            for (std::size_t j = 0; j < k; ++j) s -= a[i][j] * a[k][j];
            a[i][k] = s / a[k][k];
        }
    }
    // forward then backward substitution
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t j = 0; j < i; ++j) s -= a[i][j] * b[j];
        b[i] = s / a[i][i];
    }
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a[j][ii] * x[j];
        x[ii] = s / a[ii][ii];
    }
    return true;
}

// Column-pivoted Householder QR least squares on the scaled columns.
bool qr_solve(const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
              std::vector<double>& x) {
    const std::size_t m = y.size();
    const std::size_t n = columns.size();
    std::vector<std::vector<double>> a = columns; // work copy, column major
    std::vector<double> rhs = y;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);

    auto col_norm2_from = [&](std::size_t j, std::size_t row) {
        double s = 0.0;
        for (std::size_t i = row; i < m; ++i) s += a[j][i] * a[j][i];
        return s;
    };

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t best = k;
        double best_norm = col_norm2_from(k, k);
        for (std::size_t j = k + 1; j < n; ++j) {
            const double nj = col_norm2_from(j, k);
            if (nj > best_norm) {
                best = j;
                best_norm = nj;
            }
        }
        if (best != k) {
            std::swap(a[best], a[k]);
            std::swap(perm[best], perm[k]);
        }
        if (best_norm <= 1e-28) return false; // rank deficient

        // Householder vector for column k
        double alpha = std::sqrt(best_norm);
        if (a[k][k] > 0.0) alpha = -alpha;
        std::vector<double> v(m, 0.0);
        for (std::size_t i = k; i < m; ++i) v[i] = a[k][i];
        v[k] -= alpha;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < m; ++i) vnorm2 += v[i] * v[i];
        if (vnorm2 <= 0.0) return false;

        auto reflect = [&](std::vector<double>& col) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += v[i] * col[i];
            const double f = 2.0 * s / vnorm2;
            for (std::size_t i = k; i < m; ++i) col[i] -= f * v[i];
        };
        for (std::size_t j = k; j < n; ++j) reflect(a[j]);
        reflect(rhs);
    }

    // back substitution on the upper-triangular factor
    std::vector<double> xs(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = rhs[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= a[j][ii] * xs[j];
        if (std::abs(a[ii][ii]) <= 1e-14) return false;
        xs[ii] = s / a[ii][ii];
    }
    x.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) x[perm[j]] = xs[j];
    return true;
}

} // namespace

OlsResult ols_fit(const std::vector<std::vector<double>>& columns, const std::vector<double>& y,
                  double cond_limit) {
    const std::size_t n = columns.size();
    const std::size_t m = y.size();
    if (n == 0) throw NumericError("ols: no regressors");
    for (const auto& c : columns) {
        if (c.size() != m) throw NumericError("ols: column length mismatch");
    }
    if (m < n) throw NumericError("rank-deficient: fewer samples than regressors");

    // column scaling keeps the normal equations well conditioned when the
    // physical units differ by orders of magnitude
    std::vector<double> scale(n, 1.0);
    std::vector<std::vector<double>> sc(n);
    for (std::size_t j = 0; j < n; ++j) {
        double norm = std::sqrt(std::inner_product(columns[j].begin(), columns[j].end(),
                                                   columns[j].begin(), 0.0));
        if (norm <= 0.0) throw NumericError("rank-deficient: zero regressor column");
        scale[j] = norm;
        sc[j].resize(m);
        for (std::size_t i = 0; i < m; ++i) sc[j][i] = columns[j][i] / norm;
    }

    // scaled gram matrix
    std::vector<std::vector<double>> gram(n, std::vector<double>(n, 0.0));
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            const double s = std::inner_product(sc[a].begin(), sc[a].end(), sc[b].begin(), 0.0);
            gram[a][b] = s;
            gram[b][a] = s;
        }
    }

    // condition estimate: lambda_max via power iteration, lambda_min via the
    // inverse through Cholesky on shifted systems (cheap at this size)
    OlsResult result;
    const double lmax = power_iteration(gram, 200);
    double lmin = lmax;
    {
        // smallest eigenvalue from the power iteration of (lmax*I - gram)
        std::vector<std::vector<double>> shifted = gram;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) shifted[i][j] = -gram[i][j];
            shifted[i][i] += lmax;
        }
        const double spread = power_iteration(shifted, 200);
        lmin = std::max(lmax - spread, 0.0);
    }
    const double cond_gram = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
    result.condition_estimate = std::sqrt(cond_gram); // condition of the scaled columns

    std::vector<double> xs;
    bool solved = false;
    if (result.condition_estimate <= cond_limit) {
        std::vector<double> rhs(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            rhs[j] = std::inner_product(sc[j].begin(), sc[j].end(), y.begin(), 0.0);
        }
        solved = cholesky_solve(gram, rhs, xs);
    }
    if (!solved) {
        result.used_qr_fallback = true;
        if (!qr_solve(sc, y, xs)) {
            throw NumericError("rank-deficient: regressor matrix has no full column rank");
        }
    }

    result.coefficients.resize(n);
    for (std::size_t j = 0; j < n; ++j) result.coefficients[j] = xs[j] / scale[j];

    // residual diagnostics
    std::vector<double> resid = y;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < m; ++i) resid[i] -= columns[j][i] * result.coefficients[j];
    }
    const double rss = std::inner_product(resid.begin(), resid.end(), resid.begin(), 0.0);
    result.residual_rms = std::sqrt(rss / static_cast<double>(m));
    const double ynorm = std::sqrt(std::inner_product(y.begin(), y.end(), y.begin(), 0.0));
    double worst = 0.0;
    if (ynorm > 0.0) {
        for (std::size_t j = 0; j < n; ++j) {
            const double ip = std::inner_product(sc[j].begin(), sc[j].end(), resid.begin(), 0.0);
            worst = std::max(worst, std::abs(ip) / ynorm);
        }
    }
    result.orthogonality = worst;
    return result;
}

} // namespace rotorlab
