#pragma once

#include "ds/designs.hpp"
#include "ds/matrix.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ds {

// Result of choosing the residual-correlation level for a design.
//
// lambda_p is the chosen quantile of max_i |X^T z|_i / sigma over noise draws
// z ~ sigma * N(0, I), so the working level is lambda_p * sigma.  For the
// per-column variant, per_column holds one level per column and lambda_p is
// the shared multiplier applied to each column norm.
struct CalibrationResult {
    double lambda_p = 0.0;
    double lambda_sigma = 0.0;
    std::optional<Vector> per_column;
    double quantile = 0.0;
    std::size_t draws = 0;
    double sigma = 0.0;
    // Fraction of draws with statistic <= the selected value.
    double empirical_cdf_at_lambda = 0.0;
};

// Monte Carlo estimate of the `quantile` order statistic of
// max_i |X^T z|_i / sigma with z ~ sigma * N(0, I_n).
//
// Each draw uses its own counter-derived seed, so the result is independent
// of evaluation order and thread count.  The empirical quantile is the
// ceil(quantile * draws)-th smallest statistic.  Requires draws >= 100,
// quantile in (0, 1), sigma > 0.
CalibrationResult mc_lambda(const DesignMatrix& X, double sigma, double quantile,
                            std::size_t draws, std::uint64_t seed);

// Column-normalized variant: the statistic is max_i |(X^T z)_i| / (norm_i * sigma)
// and the returned per_column levels are kappa * norm_i, with kappa the selected
// quantile.  Doubling a column doubles its level exactly.
CalibrationResult mc_lambda_per_column(const DesignMatrix& X, double sigma, double quantile,
                                       std::size_t draws, std::uint64_t seed);

// Closed form for an orthonormal design with p columns: the quantile of
// max of p iid |N(0,1)| variables, Phi^{-1}((1 + quantile^(1/p)) / 2).
double analytic_lambda_orthonormal(std::size_t p, double quantile);

// Inverse standard normal CDF (Wichura's AS241 rational approximations).
// Accepts probabilities strictly inside (0, 1).
double inverse_normal_cdf(double prob);

}  // namespace ds
