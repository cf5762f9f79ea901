#include "ds/lasso.hpp"

#include "ds/kernels.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace ds {

namespace {

double soft(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

void validate_common(const DesignMatrix& X, const Vector& y, const LassoOptions& opts) {
    if (y.size() != X.X.rows) throw DimensionError("lasso: y length != rows of X");
    if (!all_finite(y)) throw std::invalid_argument("lasso: non-finite y");
    if (opts.lambda.has_value() == opts.t_budget.has_value())
        throw std::invalid_argument("lasso: exactly one of lambda and t_budget must be set");
    if (!(opts.tol > 0.0)) throw std::invalid_argument("lasso: tol must be positive");
}

double kkt_residual(const Matrix& XT, const Vector& r, const Vector& beta, double lambda) {
    double worst = 0.0;
    for (std::size_t j = 0; j < XT.rows; ++j) {
        const double* col = XT.row(j);
        double c = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) c += col[i] * r[i];
        double v;
        if (beta[j] > 0.0)
            v = std::fabs(c - lambda);
        else if (beta[j] < 0.0)
            v = std::fabs(c + lambda);
        else
            v = std::max(0.0, std::fabs(c) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace

Estimate solve_lasso_penalized(const DesignMatrix& X, const Vector& y, const LassoOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    validate_common(X, y, opts);
    const double lambda = *opts.lambda;
    if (!(lambda >= 0.0)) throw std::invalid_argument("lasso: lambda must be nonnegative");

    const std::size_t n = X.X.rows, p = X.X.cols;
    Matrix XT = transpose(X.X);  // contiguous columns
    Vector colsq(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        const double* col = XT.row(j);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += col[i] * col[i];
        colsq[j] = s;
    }

    Vector beta(p, 0.0), r = y;
    auto objective = [&] {
        double f = 0.0;
        for (double v : r) f += v * v;
        f *= 0.5;
        for (double v : beta) f += lambda * std::fabs(v);
        return f;
    };

    Estimate est;
    est.solver = "lasso";
    double f_prev = objective();
    if (opts.trace) opts.trace->objectives.push_back(f_prev);

    std::size_t sweep = 0;
    std::size_t calm = 0;
    const double kkt_tol = 1e-6 * (1.0 + lambda);
    bool converged = false;
    for (; sweep < opts.max_iters; ++sweep) {
        for (std::size_t j = 0; j < p; ++j) {
            if (colsq[j] == 0.0) continue;
            const double* col = XT.row(j);
            double g = 0.0;
            for (std::size_t i = 0; i < n; ++i) g += col[i] * r[i];
            const double u = beta[j] * colsq[j] + g;
            const double bj = soft(u, lambda) / colsq[j];
            const double delta = bj - beta[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) r[i] -= delta * col[i];
                beta[j] = bj;
            }
        }
        const double f = objective();
        if (opts.trace) opts.trace->objectives.push_back(f);
        const bool calm_step = std::fabs(f_prev - f) <= opts.tol * (1.0 + std::fabs(f));
        calm = calm_step ? calm + 1 : 0;
        f_prev = f;
        if (calm >= 5 && kkt_residual(XT, r, beta, lambda) <= kkt_tol) {
            converged = true;
            ++sweep;
            break;
        }
    }

    est.beta = beta;
    est.raw_beta = std::move(beta);
    est.objective = f_prev;
    est.feasibility_residual = kkt_residual(XT, r, est.beta, lambda);
    est.iterations = sweep;
    est.status = converged ? "ok" : "max_iters";
    est.wall_ms = ms_since(t0);
    return est;
}

Vector project_l1_ball(const Vector& v, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("project_l1_ball: t must be nonnegative");
    if (t == 0.0) return Vector(v.size(), 0.0);
    if (norm1(v) <= t) return v;
    Vector mag(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) mag[i] = std::fabs(v[i]);
    std::sort(mag.begin(), mag.end(), std::greater<double>());
    double prefix = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < mag.size(); ++j) {
        prefix += mag[j];
        const double cand = (prefix - t) / static_cast<double>(j + 1);
        if (mag[j] - cand > 0.0)
            theta = cand;
        else
            break;
    }
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double m = std::fabs(v[i]) - theta;
        out[i] = m > 0.0 ? (v[i] > 0.0 ? m : -m) : 0.0;
    }
    return out;
}

Estimate solve_lasso_constrained(const DesignMatrix& X, const Vector& y,
                                 const LassoOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    validate_common(X, y, opts);
    const double t = *opts.t_budget;
    if (!(t >= 0.0)) throw std::invalid_argument("lasso: t_budget must be nonnegative");

    const std::size_t p = X.X.cols;
    Estimate est;
    est.solver = "lasso_constrained";

    auto finish = [&](Vector beta, double f, std::size_t iters, bool converged) {
        est.feasibility_residual = norm1(beta) - t;
        est.beta = beta;
        est.raw_beta = std::move(beta);
        est.objective = f;
        est.iterations = iters;
        est.status = converged ? "ok" : "max_iters";
        est.wall_ms = ms_since(t0);
        return est;
    };

    auto half_sq_resid = [&](const Vector& beta) {
        Vector r = mat_vec(X.X, beta);
        double f = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double d = y[i] - r[i];
            f += d * d;
        }
        return 0.5 * f;
    };

    if (t == 0.0) return finish(Vector(p, 0.0), half_sq_resid(Vector(p, 0.0)), 0, true);

    // Largest Gram eigenvalue by power iteration, padded for a safe step.
    Matrix G = gram(X.X);
    Vector v(p, 1.0 / std::sqrt(static_cast<double>(p)));
    double eig = 1.0;
    for (int it = 0; it < 100; ++it) {
        Vector Gv = mat_vec(G, v);
        const double nrm = norm2(Gv);
        if (nrm == 0.0) break;
        eig = nrm;
        for (std::size_t i = 0; i < p; ++i) v[i] = Gv[i] / nrm;
    }
    const double L = 1.05 * std::max(eig, 1e-12);

    Vector beta(p, 0.0), vk = beta;
    double momentum = 1.0;
    double f_prev = half_sq_resid(beta);
    if (opts.trace) opts.trace->objectives.push_back(f_prev);
    std::size_t iter = 0;
    std::size_t calm = 0;
    bool converged = false;
    for (; iter < opts.max_iters; ++iter) {
        Vector rv = mat_vec(X.X, vk);
        for (std::size_t i = 0; i < rv.size(); ++i) rv[i] -= y[i];
        Vector grad = mat_transpose_vec(X.X, rv);
        Vector next(p);
        for (std::size_t i = 0; i < p; ++i) next[i] = vk[i] - grad[i] / L;
        next = project_l1_ball(next, t);

        const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double mix = (momentum - 1.0) / m_next;
        for (std::size_t i = 0; i < p; ++i) vk[i] = next[i] + mix * (next[i] - beta[i]);
        momentum = m_next;
        beta = std::move(next);

        const double f = half_sq_resid(beta);
        if (opts.trace) opts.trace->objectives.push_back(f);
        if (f > f_prev) {
            // adaptive restart: the momentum overshot, drop it
            momentum = 1.0;
            vk = beta;
        }
        const bool calm_step = std::fabs(f_prev - f) <= opts.tol * (1.0 + std::fabs(f));
        calm = calm_step ? calm + 1 : 0;
        f_prev = f;
        if (calm >= 5) {
            converged = true;
            ++iter;
            break;
        }
    }
    return finish(std::move(beta), f_prev, iter, converged);
}

}  // namespace ds
