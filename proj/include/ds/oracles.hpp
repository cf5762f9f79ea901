#pragma once

#include "ds/dantzig.hpp"
#include "ds/designs.hpp"
#include "ds/estimate.hpp"
#include "ds/lasso.hpp"
#include "ds/linalg.hpp"
#include "ds/matrix.hpp"

#include <optional>
#include <stdexcept>

namespace ds {

// Exhaustive subset scans refuse instances past the cap (default 20 columns).
class ExhaustiveSearchError : public std::runtime_error {
  public:
    ExhaustiveSearchError(std::size_t p, std::size_t cap)
        : std::runtime_error("exhaustive search refused: p = " + std::to_string(p) +
                             " exceeds " + std::to_string(cap)) {}
};

// Bias/variance split of the prediction risk of least squares restricted to
// a column subset.
struct SubsetRisk {
    IndexSet subset;
    double bias_sq = 0.0;   // min over b supported on subset of ||Xb - X beta||^2
    double variance = 0.0;  // sigma^2 * |subset|
    double total = 0.0;     // bias_sq + variance
};

// Expected prediction error of the least-squares fit on `support` when
// y = X beta_true + sigma z. Exact formula, no Monte Carlo. Requires the
// subset Gram to be nonsingular.
SubsetRisk subset_prediction_risk(const DesignMatrix& X, const Vector& beta_true, double sigma,
                                  const IndexSet& support);

struct IdealRisk {
    double risk = 0.0;
    IndexSet subset;
};

// Minimizes the subset prediction risk over all 2^p subsets (singular ones
// skipped). Ties broken toward smaller risk, then smaller subset, then
// lexicographic support order.
IdealRisk ideal_risk(const DesignMatrix& X, const Vector& beta_true, double sigma,
                     std::size_t max_p = 20);

// sigma^2 + sum_i min(beta_i^2, sigma^2).
double ideal_bound(const Vector& beta_true, double sigma);

// Exhaustive complexity-penalized selection: minimizes
// ||y - X b||^2 + lambda_p * sigma^2 * |I| over least-squares fits on
// subsets I. Same tie rule as ideal_risk. The returned Estimate carries the
// refit coefficients, the best penalized cost as objective, and the number
// of subsets scanned as iterations.
Estimate canonical_selection(const DesignMatrix& X, const Vector& y, double sigma,
                             double lambda_p, std::size_t max_p = 20);

// Two-stage refinement: run the selector, keep coefficients above the
// threshold, refit least squares on the survivors. The threshold is tau when
// given, else 1e-3 * max(1, ||stage-1 beta||_inf). A singular refit subset
// drops the smallest surviving stage-1 coefficient and retries. raw_beta
// keeps the stage-1 estimate; objective is half the squared refit residual.
Estimate gauss_dantzig(const DesignMatrix& X, const Vector& y, const DSOptions& opts,
                       std::optional<double> tau = std::nullopt);

// Same two-stage scheme with the penalized lasso as stage 1.
Estimate gauss_lasso(const DesignMatrix& X, const Vector& y, const LassoOptions& opts,
                     std::optional<double> tau = std::nullopt);

// Least squares of y restricted to `support`, zeros elsewhere.
Vector refit_on_support(const DesignMatrix& X, const Vector& y, const IndexSet& support);

// Indices with |beta_i| > 1e-8 * max(1, ||beta||_inf).
IndexSet estimated_support(const Vector& beta);

struct Metrics {
    double rel_l2_error = 0.0;      // ||bhat - b|| / ||b||; if b = 0, 1 when bhat != 0
    double mse = 0.0;               // ||bhat - b||^2 / p
    double pred_error = 0.0;        // ||X (bhat - b)||^2
    double support_precision = 1.0; // 1 when the estimated support is empty
    double support_recall = 1.0;    // 1 when the true support is empty
};

Metrics evaluate(const Vector& beta_hat, const SparseTruth& truth, const DesignMatrix& X);

}  // namespace ds
