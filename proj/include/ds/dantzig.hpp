#pragma once

#include "ds/designs.hpp"
#include "ds/estimate.hpp"
#include "ds/ipm.hpp"

#include <optional>

namespace ds {

struct DSOptions {
    double lambda_sigma = 1.0;                // residual-correlation bound
    std::optional<Vector> per_column_lambda;  // per-column bounds, overrides lambda_sigma
    double tol_gap = 1e-8;
    double tol_feas = 1e-8;
    std::size_t max_iters = 100;
};

// The selector minimizes the l1 norm of beta subject to
// ||X'(y - X beta)||_inf <= lambda_sigma (componentwise bounds in per-column
// mode). Cast as a linear program over the split beta = u - v, u, v >= 0:
//   min 1'(u + v)  s.t.  +G(u - v) <= level + X'y
//                        -G(u - v) <= level - X'y
// with G = X'X; 2p variables, 2p rows, all variables nonnegative. In
// per-column mode the cost weights each |beta_i| by level_i / mean(level).
LPProblem assemble_ds_lp(const DesignMatrix& X, const Vector& y, const DSOptions& opts);

// Solves the selector via the interior-point method. The returned beta has
// entries below 1e-10 * max(1, ||beta||_inf) snapped to zero; the raw LP
// output is kept in raw_beta. objective is the (weighted) l1 norm,
// feasibility_residual = max_i |(X'(y - X beta))_i| - level_i (<= 0 up to
// tol_feas * (1 + level) when the solve succeeds).
Estimate solve_ds(const DesignMatrix& X, const Vector& y, const DSOptions& opts);

// max_i |(X'(y - X beta))_i| - level_i; nonpositive means feasible.
double check_feasibility(const DesignMatrix& X, const Vector& y, const Vector& beta,
                         const DSOptions& opts);

}  // namespace ds
