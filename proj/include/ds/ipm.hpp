#pragma once

#include "ds/matrix.hpp"

#include <cstddef>
#include <string>

namespace ds {

// min c'x  subject to  A x <= b,  x_i >= 0 for i < nonneg_count
// (variables past nonneg_count are free).
struct LPProblem {
    Vector c;
    Matrix A;
    Vector b;
    std::size_t nonneg_count = 0;
};

enum class LPStatus { optimal, max_iters, numerical_failure };

std::string to_string(LPStatus s);

struct LPSolution {
    Vector x;
    Vector dual;               // multiplier per inequality row, >= 0
    double objective = 0.0;
    double gap = 0.0;          // complementarity x'z + s'y at exit
    double primal_infeas = 0.0;  // ||b - Ax - s||_inf / (1 + ||b||_inf)
    double dual_infeas = 0.0;    // ||z - c - A'y||_inf / (1 + ||c||_inf)
    std::size_t iterations = 0;
    LPStatus status = LPStatus::numerical_failure;
};

struct IpmOptions {
    double tol_gap = 1e-8;
    double tol_feas = 1e-8;
    std::size_t max_iters = 100;
    // Extra absolute target on ||b - Ax - s||_inf; 0 disables it.
    double primal_feas_abs = 0.0;
};

// Infeasible-start primal-dual path following with a predictor-corrector
// step, fraction to the boundary 0.99. Newton systems are reduced to SPD
// normal equations in the primal variables.
LPSolution ipm_solve(const LPProblem& lp, const IpmOptions& opts = {});

// Same algorithm for the selector LP, whose constraint matrix is
// [[G, -G], [-G, G]] with G = X'X: the per-iteration SPD system collapses to
// p x p, or to n x n through the matrix-inversion identity when n < p.
// c and b have length 2p; all variables are nonnegative. x0_hint, when
// given, seeds the primal start (it is clamped to >= 1 elementwise).
LPSolution ipm_solve_selector(const Vector& c, const Vector& b, const Matrix& X,
                              const Matrix& G, const IpmOptions& opts = {},
                              const Vector* x0_hint = nullptr);

}  // namespace ds
