#include "ds/dantzig.hpp"

#include "ds/kernels.hpp"
#include "ds/linalg.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ds {

namespace {

Vector resolve_levels(std::size_t p, const DSOptions& opts) {
    if (opts.per_column_lambda) {
        const Vector& lv = *opts.per_column_lambda;
        if (lv.size() != p)
            throw DimensionError("selector: per_column_lambda length != p");
        for (double v : lv)
            if (!(v > 0.0)) throw std::invalid_argument("selector: nonpositive level");
        return lv;
    }
    if (!(opts.lambda_sigma > 0.0))
        throw std::invalid_argument("selector: nonpositive level");
    return Vector(p, opts.lambda_sigma);
}

Vector cost_weights(std::size_t p, const DSOptions& opts, const Vector& levels) {
    Vector w(p, 1.0);
    if (opts.per_column_lambda) {
        double mean = 0.0;
        for (double v : levels) mean += v;
        mean /= static_cast<double>(p);
        for (std::size_t i = 0; i < p; ++i) w[i] = levels[i] / mean;
    }
    return w;
}

void check_xy(const DesignMatrix& X, const Vector& y) {
    if (y.size() != X.X.rows) throw DimensionError("selector: y length != rows of X");
    if (!all_finite(y)) throw std::invalid_argument("selector: non-finite y");
}

struct AssembledSelector {
    Vector c;        // 2p cost
    Vector b;        // 2p bounds
    Matrix G;        // X'X
    Vector cxy;      // X'y
    Vector levels;   // per-coordinate bounds
    Vector weights;  // cost weight per coordinate
};

AssembledSelector assemble_core(const DesignMatrix& X, const Vector& y, const DSOptions& opts) {
    check_xy(X, y);
    const std::size_t p = X.X.cols;
    AssembledSelector as;
    as.levels = resolve_levels(p, opts);
    as.weights = cost_weights(p, opts, as.levels);
    as.G = gram(X.X);
    as.cxy = mat_transpose_vec(X.X, y);
    as.c.resize(2 * p);
    as.b.resize(2 * p);
    for (std::size_t i = 0; i < p; ++i) {
        as.c[i] = as.weights[i];
        as.c[i + p] = as.weights[i];
        as.b[i] = as.levels[i] + as.cxy[i];
        as.b[i + p] = as.levels[i] - as.cxy[i];
    }
    return as;
}

}  // namespace

LPProblem assemble_ds_lp(const DesignMatrix& X, const Vector& y, const DSOptions& opts) {
    AssembledSelector as = assemble_core(X, y, opts);
    const std::size_t p = X.X.cols;
    LPProblem lp;
    lp.c = std::move(as.c);
    lp.b = std::move(as.b);
    lp.nonneg_count = 2 * p;
    lp.A = Matrix(2 * p, 2 * p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            const double g = as.G(i, j);
            lp.A(i, j) = g;
            lp.A(i, j + p) = -g;
            lp.A(i + p, j) = -g;
            lp.A(i + p, j + p) = g;
        }
    return lp;
}

double check_feasibility(const DesignMatrix& X, const Vector& y, const Vector& beta,
                         const DSOptions& opts) {
    check_xy(X, y);
    if (beta.size() != X.X.cols) throw DimensionError("check_feasibility: beta length != p");
    Vector levels = resolve_levels(X.X.cols, opts);
    Vector r = y;
    Vector Xb = mat_vec(X.X, beta);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= Xb[i];
    Vector corr = mat_transpose_vec(X.X, r);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < corr.size(); ++i)
        worst = std::max(worst, std::fabs(corr[i]) - levels[i]);
    return worst;
}

Estimate solve_ds(const DesignMatrix& X, const Vector& y, const DSOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    AssembledSelector as = assemble_core(X, y, opts);
    const std::size_t p = X.X.cols;

    Estimate est;
    est.solver = "ds";

    // beta = 0 is optimal whenever it is feasible: the objective cannot go
    // below zero.
    bool zero_feasible = true;
    for (std::size_t i = 0; i < p; ++i)
        if (std::fabs(as.cxy[i]) > as.levels[i]) {
            zero_feasible = false;
            break;
        }
    if (zero_feasible) {
        est.beta.assign(p, 0.0);
        est.raw_beta = est.beta;
        est.objective = 0.0;
        est.feasibility_residual = check_feasibility(X, y, est.beta, opts);
        est.status = "ok";
        est.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        return est;
    }

    // Ridge least-squares start in beta space, split and clamped at 1.
    Matrix Gr = as.G;
    double scale = 0.0;
    for (std::size_t i = 0; i < p; ++i) scale = std::max(scale, Gr(i, i));
    for (std::size_t i = 0; i < p; ++i) Gr(i, i) += 1e-6 * (1.0 + scale);
    Vector beta0 = solve_spd(Gr, as.cxy);
    Vector x0(2 * p);
    for (std::size_t i = 0; i < p; ++i) {
        x0[i] = std::max(beta0[i], 1.0);
        x0[i + p] = std::max(-beta0[i], 1.0);
    }

    IpmOptions iopt;
    iopt.tol_gap = opts.tol_gap;
    iopt.tol_feas = opts.tol_feas;
    iopt.max_iters = opts.max_iters;
    // The estimate-level feasibility contract is absolute in the level, so
    // the LP gets an absolute primal target as well.
    double min_level = as.levels[0];
    for (double v : as.levels) min_level = std::min(min_level, v);
    iopt.primal_feas_abs = 0.5 * opts.tol_feas * (1.0 + min_level);

    LPSolution sol = ipm_solve_selector(as.c, as.b, X.X, as.G, iopt, &x0);

    est.raw_beta.resize(p);
    for (std::size_t i = 0; i < p; ++i) est.raw_beta[i] = sol.x[i] - sol.x[i + p];
    est.beta = est.raw_beta;
    const double snap = 1e-10 * std::max(1.0, norm_inf(est.raw_beta));
    for (double& v : est.beta)
        if (std::fabs(v) < snap) v = 0.0;

    est.objective = 0.0;
    for (std::size_t i = 0; i < p; ++i) est.objective += as.weights[i] * std::fabs(est.beta[i]);
    est.feasibility_residual = check_feasibility(X, y, est.beta, opts);
    est.iterations = sol.iterations;
    est.gap = sol.gap;
    est.primal_infeas = sol.primal_infeas;
    est.dual_infeas = sol.dual_infeas;
    est.status = sol.status == LPStatus::optimal ? "ok" : to_string(sol.status);
    est.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return est;
}

}  // namespace ds
