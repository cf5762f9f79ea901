#pragma once

#include "ds/designs.hpp"
#include "ds/estimate.hpp"

#include <optional>
#include <vector>

namespace ds {

// Per-sweep objective values, for convergence inspection in tests.
struct LassoTrace {
    std::vector<double> objectives;
};

struct LassoOptions {
    std::optional<double> lambda;    // penalized form: 0.5||y - Xb||^2 + lambda*||b||_1
    std::optional<double> t_budget;  // constrained form: min ||y - Xb||^2 over ||b||_1 <= t
    double tol = 1e-8;               // relative objective decrease
    std::size_t max_iters = 10000;
    LassoTrace* trace = nullptr;
};

// Cyclic coordinate descent on the penalized objective. Stops once the
// relative objective decrease stays below tol for 5 consecutive sweeps and
// the KKT residual is within 1e-6 * (1 + lambda); hitting max_iters flags
// the estimate instead of converging. objective holds the penalized value,
// feasibility_residual the KKT residual.
Estimate solve_lasso_penalized(const DesignMatrix& X, const Vector& y, const LassoOptions& opts);

// Accelerated projected gradient over the l1 ball of radius t_budget, step
// from a power-iteration bound on the largest Gram eigenvalue. objective
// holds 0.5||y - Xb||^2, feasibility_residual = ||b||_1 - t.
Estimate solve_lasso_constrained(const DesignMatrix& X, const Vector& y, const LassoOptions& opts);

// Euclidean projection onto {x : ||x||_1 <= t} by the sorted-threshold rule.
Vector project_l1_ball(const Vector& v, double t);

}  // namespace ds
