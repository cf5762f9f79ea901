#include "ds/ipm.hpp"

#include "ds/kernels.hpp"
#include "ds/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace ds {

std::string to_string(LPStatus s) {
    switch (s) {
        case LPStatus::optimal: return "optimal";
        case LPStatus::max_iters: return "max_iters";
        case LPStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}

namespace {

// Abstracts the constraint matrix and the SPD normal-equation solve
//   M = A' diag(w) A + diag(theta)
// so the driver is shared between the dense path and the selector path.
class NormalSolver {
  public:
    virtual ~NormalSolver() = default;
    virtual bool factor(const Vector& theta, const Vector& w) = 0;
    virtual Vector solve(const Vector& rhs) = 0;
    virtual Vector apply_A(const Vector& x) const = 0;
    virtual Vector apply_At(const Vector& y) const = 0;
};

void symmetrize(Matrix& M) {
    for (std::size_t i = 0; i < M.rows; ++i)
        for (std::size_t j = i + 1; j < M.cols; ++j) {
            const double v = 0.5 * (M(i, j) + M(j, i));
            M(i, j) = v;
            M(j, i) = v;
        }
}

// Cholesky with an escalating diagonal shift; the shift is refined away later
// against the unshifted matrix.
std::optional<CholeskyFactor> factor_with_shift(const Matrix& M) {
    double scale = 0.0;
    for (std::size_t i = 0; i < M.rows; ++i) scale = std::max(scale, M(i, i));
    scale = 1.0 + scale;
    for (double reg : {0.0, 1e-12, 1e-8, 1e-4}) {
        Matrix Ms = M;
        if (reg > 0.0)
            for (std::size_t i = 0; i < Ms.rows; ++i) Ms(i, i) += reg * scale;
        try {
            return cholesky(Ms);
        } catch (const NotPositiveDefiniteError&) {
        }
    }
    return std::nullopt;
}

class DenseNormalSolver : public NormalSolver {
  public:
    explicit DenseNormalSolver(const Matrix& A) : A_(A) {}

    bool factor(const Vector& theta, const Vector& w) override {
        Matrix WA = scale_rows(A_, w);
        M_ = mat_mul_transA(A_, WA);
        symmetrize(M_);
        for (std::size_t i = 0; i < M_.rows; ++i) M_(i, i) += theta[i];
        auto F = factor_with_shift(M_);
        if (!F) return false;
        chol_ = std::move(*F);
        return true;
    }

    Vector solve(const Vector& rhs) override {
        Vector x = chol_.solve(rhs);
        Vector r = rhs;
        Vector Mx = mat_vec(M_, x);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= Mx[i];
        chol_.solve_in_place(r);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += r[i];
        return x;
    }

    Vector apply_A(const Vector& x) const override { return mat_vec(A_, x); }
    Vector apply_At(const Vector& y) const override { return mat_transpose_vec(A_, y); }

  private:
    const Matrix& A_;
    Matrix M_;
    CholeskyFactor chol_;
};

// Selector structure: A = [[G, -G], [-G, G]], so
//   A' diag(w) A + diag(theta) = [[K + Tp, -K], [-K, K + Tm]]
// with K = G diag(sigma) G, sigma = w_plus + w_minus. Eliminating the block
// coupling leaves (K + diag(phi)) g = r1 + K (r1 + r2)/theta_minus with
// phi = theta_plus*theta_minus/(theta_plus+theta_minus), from which
//   du = theta_minus/(theta_plus+theta_minus) * g
//   dv = (r1 + r2 - theta_plus*du)/theta_minus.
// When n < p the p x p solve is replaced by two n x n factorizations via
//   (Phi + X'BX)^-1 = Phi^-1 - Phi^-1 Xt' (I + Xt Phi^-1 Xt')^-1 Xt Phi^-1
// with B = X diag(sigma) X' = LL' and Xt = L'X.
class SelectorNormalSolver : public NormalSolver {
  public:
    SelectorNormalSolver(const Matrix& X, const Matrix& G)
        : X_(X), G_(G), n_(X.rows), p_(X.cols) {}

    bool factor(const Vector& theta, const Vector& w) override {
        sigma_.assign(p_, 0.0);
        phi_.assign(p_, 0.0);
        theta_plus_.assign(p_, 0.0);
        theta_minus_.assign(p_, 0.0);
        for (std::size_t k = 0; k < p_; ++k) {
            sigma_[k] = w[k] + w[k + p_];
            theta_plus_[k] = theta[k];
            theta_minus_[k] = theta[k + p_];
            phi_[k] = theta_plus_[k] * theta_minus_[k] / (theta_plus_[k] + theta_minus_[k]);
        }
        have_B_ = false;
        woodbury_ = false;

        if (n_ < p_) {
            B_ = row_outer(X_, sigma_);
            have_B_ = true;
            // The n x n shortcut sandwiches a solve between diag(1/phi)
            // factors, so once those grow the benign error structure of the
            // plain normal equations is lost; past this bound the late
            // iterations take the p x p route instead.
            double max_inv_phi = 0.0, max_b = 0.0;
            for (std::size_t k = 0; k < p_; ++k)
                max_inv_phi = std::max(max_inv_phi, 1.0 / phi_[k]);
            for (std::size_t i = 0; i < n_; ++i) max_b = std::max(max_b, B_(i, i));
            if ((1.0 + max_b) * max_inv_phi < 1e11) try {
                CholeskyFactor LB = cholesky(B_);
                Matrix Xt = mat_mul_transA(LB.L, X_);
                Vector inv_phi(p_);
                for (std::size_t k = 0; k < p_; ++k) inv_phi[k] = 1.0 / phi_[k];
                Matrix C = row_outer(Xt, inv_phi);
                for (std::size_t i = 0; i < n_; ++i) C(i, i) += 1.0;
                chol_C_ = cholesky(C);
                Xt_ = std::move(Xt);
                woodbury_ = true;
                return true;
            } catch (const NotPositiveDefiniteError&) {
                // fall through to the dense p x p route
            }
        }

        if (n_ <= p_) {
            if (!have_B_) {
                B_ = row_outer(X_, sigma_);
                have_B_ = true;
            }
            Matrix T = mat_mul(B_, X_);
            M_ = mat_mul_transA(X_, T);
        } else {
            M_ = mat_mul(scale_cols(G_, sigma_), G_);
        }
        symmetrize(M_);
        for (std::size_t k = 0; k < p_; ++k) M_(k, k) += phi_[k];
        auto F = factor_with_shift(M_);
        if (!F) return false;
        chol_M_ = std::move(*F);
        return true;
    }

    Vector solve(const Vector& rhs) override {
        Vector r1(rhs.begin(), rhs.begin() + static_cast<std::ptrdiff_t>(p_));
        Vector r2(rhs.begin() + static_cast<std::ptrdiff_t>(p_), rhs.end());
        // Reduced system in d = du - dv; every reconstruction below divides
        // by theta_plus + theta_minus only, which the split costs keep away
        // from zero, so no tiny-pivot blowup near convergence.
        Vector red(p_);
        for (std::size_t k = 0; k < p_; ++k) {
            const double sum = theta_plus_[k] + theta_minus_[k];
            red[k] = (theta_minus_[k] * r1[k] - theta_plus_[k] * r2[k]) / sum;
        }

        Vector d = solve_reduced(red);
        // One refinement step against the exact reduced operator.
        Vector res = apply_K(d);
        for (std::size_t k = 0; k < p_; ++k) res[k] = red[k] - res[k] - phi_[k] * d[k];
        Vector dd = solve_reduced(res);
        for (std::size_t k = 0; k < p_; ++k) d[k] += dd[k];

        Vector out(2 * p_);
        for (std::size_t k = 0; k < p_; ++k) {
            const double sum = theta_plus_[k] + theta_minus_[k];
            const double both = r1[k] + r2[k];
            out[k] = (both + theta_minus_[k] * d[k]) / sum;
            out[k + p_] = (both - theta_plus_[k] * d[k]) / sum;
        }
        return out;
    }

    Vector apply_A(const Vector& x) const override {
        Vector d(p_);
        for (std::size_t k = 0; k < p_; ++k) d[k] = x[k] - x[k + p_];
        Vector g = mat_vec(G_, d);
        Vector out(2 * p_);
        for (std::size_t k = 0; k < p_; ++k) {
            out[k] = g[k];
            out[k + p_] = -g[k];
        }
        return out;
    }

    Vector apply_At(const Vector& y) const override {
        Vector d(p_);
        for (std::size_t k = 0; k < p_; ++k) d[k] = y[k] - y[k + p_];
        Vector g = mat_vec(G_, d);
        Vector out(2 * p_);
        for (std::size_t k = 0; k < p_; ++k) {
            out[k] = g[k];
            out[k + p_] = -g[k];
        }
        return out;
    }

  private:
    Vector apply_K(const Vector& v) const {
        if (have_B_) {
            Vector t = mat_vec(X_, v);
            t = mat_vec(B_, t);
            return mat_transpose_vec(X_, t);
        }
        Vector t = mat_vec(G_, v);
        for (std::size_t k = 0; k < p_; ++k) t[k] *= sigma_[k];
        return mat_vec(G_, t);
    }

    Vector solve_reduced(const Vector& rhs) {
        if (woodbury_) {
            Vector v1(p_);
            for (std::size_t k = 0; k < p_; ++k) v1[k] = rhs[k] / phi_[k];
            Vector t = mat_vec(Xt_, v1);
            chol_C_.solve_in_place(t);
            Vector v2 = mat_transpose_vec(Xt_, t);
            for (std::size_t k = 0; k < p_; ++k) v1[k] -= v2[k] / phi_[k];
            return v1;
        }
        return chol_M_.solve(rhs);
    }

    const Matrix& X_;
    const Matrix& G_;
    std::size_t n_, p_;
    Vector sigma_, phi_, theta_plus_, theta_minus_;
    Matrix B_, Xt_, M_;
    CholeskyFactor chol_C_, chol_M_;
    bool have_B_ = false;
    bool woodbury_ = false;
};

struct Direction {
    Vector dx, ds, dy, dz;
};

// Longest step in [0, cap] keeping v + a*dv >= 0.
double max_step(const Vector& v, const Vector& dv, double cap) {
    double a = cap;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -v[i] / dv[i]);
    return a;
}

Direction newton_step(NormalSolver& ns, const Vector& x, const Vector& s, const Vector& y,
                      const Vector& rp, const Vector& rd, const Vector& rcx,
                      const Vector& rcs) {
    const std::size_t nv = x.size(), m = s.size();
    Vector t(m);
    for (std::size_t j = 0; j < m; ++j) t[j] = (y[j] * rp[j] - rcs[j]) / s[j];
    Vector rhs = ns.apply_At(t);
    for (std::size_t i = 0; i < nv; ++i) rhs[i] += rcx[i] / x[i] + rd[i];

    Direction d;
    d.dx = ns.solve(rhs);
    Vector Adx = ns.apply_A(d.dx);
    d.ds.resize(m);
    d.dy.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        d.ds[j] = rp[j] - Adx[j];
        d.dy[j] = (rcs[j] - y[j] * d.ds[j]) / s[j];
    }
    d.dz = ns.apply_At(d.dy);
    for (std::size_t i = 0; i < nv; ++i) d.dz[i] -= rd[i];
    return d;
}

LPSolution run_ipm(const Vector& c, const Vector& b, NormalSolver& ns, const IpmOptions& opt,
                   Vector x) {
    const std::size_t nv = c.size(), m = b.size();
    for (double& v : x) v = std::max(v, 1.0);
    Vector Ax = ns.apply_A(x);
    Vector s(m), y(m, 1.0);
    for (std::size_t j = 0; j < m; ++j) s[j] = std::max(b[j] - Ax[j], 1.0);
    Vector z = ns.apply_At(y);
    for (std::size_t i = 0; i < nv; ++i) z[i] = std::max(c[i] + z[i], 1.0);

    const double bn = 1.0 + norm_inf(b), cn = 1.0 + norm_inf(c);
    LPSolution sol;
    sol.status = LPStatus::max_iters;
    int consecutive_fail = 0;

    std::size_t iter = 0;
    for (; iter < opt.max_iters; ++iter) {
        Ax = ns.apply_A(x);
        Vector Aty = ns.apply_At(y);
        Vector rp(m), rd(nv);
        for (std::size_t j = 0; j < m; ++j) rp[j] = b[j] - Ax[j] - s[j];
        for (std::size_t i = 0; i < nv; ++i) rd[i] = z[i] - c[i] - Aty[i];

        const double gap = dot(x, z) + dot(s, y);
        const double obj = dot(c, x);
        const double mu = gap / static_cast<double>(nv + m);
        const double rp_inf = norm_inf(rp);
        sol.gap = gap;
        sol.objective = obj;
        sol.primal_infeas = rp_inf / bn;
        sol.dual_infeas = norm_inf(rd) / cn;

        if (!std::isfinite(gap) || !std::isfinite(obj)) {
            sol.status = LPStatus::numerical_failure;
            break;
        }
        const bool prim_ok = sol.primal_infeas <= opt.tol_feas &&
                             (opt.primal_feas_abs <= 0.0 || rp_inf <= opt.primal_feas_abs);
        if (prim_ok && sol.dual_infeas <= opt.tol_feas &&
            gap <= opt.tol_gap * (1.0 + std::fabs(obj))) {
            sol.status = LPStatus::optimal;
            break;
        }
        if (norm_inf(x) > 1e16 || norm_inf(s) > 1e16) break;

        Vector theta(nv), w(m);
        for (std::size_t i = 0; i < nv; ++i) theta[i] = z[i] / x[i];
        for (std::size_t j = 0; j < m; ++j) w[j] = y[j] / s[j];

        auto recenter = [&] {
            const double shift = std::max(1e-8, std::sqrt(std::max(mu, 0.0)));
            for (std::size_t i = 0; i < nv; ++i) {
                x[i] += shift;
                z[i] += shift;
            }
            for (std::size_t j = 0; j < m; ++j) {
                s[j] += shift;
                y[j] += shift;
            }
        };

        if (!ns.factor(theta, w)) {
            if (++consecutive_fail >= 3) {
                sol.status = LPStatus::numerical_failure;
                break;
            }
            recenter();
            continue;
        }

        // Predictor.
        Vector rcx(nv), rcs(m);
        for (std::size_t i = 0; i < nv; ++i) rcx[i] = -x[i] * z[i];
        for (std::size_t j = 0; j < m; ++j) rcs[j] = -s[j] * y[j];
        Direction aff = newton_step(ns, x, s, y, rp, rd, rcx, rcs);

        const double ap_aff = max_step(x, aff.dx, std::min(max_step(s, aff.ds, 1.0), 1.0));
        const double ad_aff = max_step(z, aff.dz, std::min(max_step(y, aff.dy, 1.0), 1.0));
        double mu_aff = 0.0;
        for (std::size_t i = 0; i < nv; ++i)
            mu_aff += (x[i] + ap_aff * aff.dx[i]) * (z[i] + ad_aff * aff.dz[i]);
        for (std::size_t j = 0; j < m; ++j)
            mu_aff += (s[j] + ap_aff * aff.ds[j]) * (y[j] + ad_aff * aff.dy[j]);
        mu_aff /= static_cast<double>(nv + m);
        double sigma = mu > 0.0 ? std::pow(mu_aff / mu, 3.0) : 0.0;
        sigma = std::clamp(sigma, 1e-8, 1.0);

        // Corrector.
        const double target = sigma * mu;
        for (std::size_t i = 0; i < nv; ++i)
            rcx[i] = target - x[i] * z[i] - aff.dx[i] * aff.dz[i];
        for (std::size_t j = 0; j < m; ++j)
            rcs[j] = target - s[j] * y[j] - aff.ds[j] * aff.dy[j];
        Direction dir = newton_step(ns, x, s, y, rp, rd, rcx, rcs);

        const double ap =
            std::min(1.0, 0.99 * std::min(max_step(x, dir.dx, 1e30), max_step(s, dir.ds, 1e30)));
        const double ad =
            std::min(1.0, 0.99 * std::min(max_step(z, dir.dz, 1e30), max_step(y, dir.dy, 1e30)));
        if (ap < 1e-13 && ad < 1e-13) {
            if (++consecutive_fail >= 3) {
                sol.status = LPStatus::numerical_failure;
                break;
            }
            recenter();
            continue;
        }
        consecutive_fail = 0;

        for (std::size_t i = 0; i < nv; ++i) {
            x[i] += ap * dir.dx[i];
            z[i] += ad * dir.dz[i];
        }
        for (std::size_t j = 0; j < m; ++j) {
            s[j] += ap * dir.ds[j];
            y[j] += ad * dir.dy[j];
        }
    }

    sol.iterations = std::min(iter, opt.max_iters);
    sol.x = std::move(x);
    sol.dual = std::move(y);
    return sol;
}

void validate_lp(const LPProblem& lp) {
    if (lp.A.rows == 0 || lp.A.cols == 0) throw DimensionError("ipm_solve: empty constraint matrix");
    if (lp.c.size() != lp.A.cols) throw DimensionError("ipm_solve: c length != columns of A");
    if (lp.b.size() != lp.A.rows) throw DimensionError("ipm_solve: b length != rows of A");
    if (lp.nonneg_count > lp.c.size())
        throw std::invalid_argument("ipm_solve: nonneg_count exceeds variable count");
    if (!all_finite(lp.c) || !all_finite(lp.b) || !all_finite(lp.A))
        throw std::invalid_argument("ipm_solve: non-finite input");
}

// Ridge least-squares start: argmin ||Ax - b||^2 + d||x||^2, clamped to >= 1.
Vector ridge_start(const Matrix& A, const Vector& b) {
    Matrix M = mat_mul_transA(A, A);
    symmetrize(M);
    double scale = 0.0;
    for (std::size_t i = 0; i < M.rows; ++i) scale = std::max(scale, M(i, i));
    for (std::size_t i = 0; i < M.rows; ++i) M(i, i) += 1e-6 * (1.0 + scale);
    Vector rhs = mat_transpose_vec(A, b);
    return solve_spd(M, rhs);
}

}  // namespace

LPSolution ipm_solve(const LPProblem& lp, const IpmOptions& opts) {
    validate_lp(lp);
    const std::size_t nv = lp.c.size();
    const std::size_t nfree = nv - lp.nonneg_count;

    if (nfree == 0) {
        DenseNormalSolver ns(lp.A);
        Vector x0 = ridge_start(lp.A, lp.b);
        return run_ipm(lp.c, lp.b, ns, opts, std::move(x0));
    }

    // Split each free variable into a difference of nonnegatives.
    const std::size_t nn = lp.nonneg_count;
    Matrix A2(lp.A.rows, nn + 2 * nfree);
    Vector c2(nn + 2 * nfree);
    for (std::size_t j = 0; j < nn; ++j) c2[j] = lp.c[j];
    for (std::size_t f = 0; f < nfree; ++f) {
        c2[nn + f] = lp.c[nn + f];
        c2[nn + nfree + f] = -lp.c[nn + f];
    }
    for (std::size_t i = 0; i < lp.A.rows; ++i) {
        for (std::size_t j = 0; j < nn; ++j) A2(i, j) = lp.A(i, j);
        for (std::size_t f = 0; f < nfree; ++f) {
            A2(i, nn + f) = lp.A(i, nn + f);
            A2(i, nn + nfree + f) = -lp.A(i, nn + f);
        }
    }
    DenseNormalSolver ns(A2);
    Vector x0 = ridge_start(A2, lp.b);
    LPSolution sol = run_ipm(c2, lp.b, ns, opts, std::move(x0));

    Vector x(nv);
    for (std::size_t j = 0; j < nn; ++j) x[j] = sol.x[j];
    for (std::size_t f = 0; f < nfree; ++f) x[nn + f] = sol.x[nn + f] - sol.x[nn + nfree + f];
    sol.x = std::move(x);
    return sol;
}

LPSolution ipm_solve_selector(const Vector& c, const Vector& b, const Matrix& X,
                              const Matrix& G, const IpmOptions& opts, const Vector* x0_hint) {
    const std::size_t p = X.cols;
    if (G.rows != p || G.cols != p) throw DimensionError("ipm_solve_selector: G is not p x p");
    if (c.size() != 2 * p || b.size() != 2 * p)
        throw DimensionError("ipm_solve_selector: c and b must have length 2p");
    SelectorNormalSolver ns(X, G);
    Vector x0;
    if (x0_hint) {
        if (x0_hint->size() != 2 * p)
            throw DimensionError("ipm_solve_selector: x0_hint must have length 2p");
        x0 = *x0_hint;
    } else {
        x0.assign(2 * p, 1.0);
    }
    return run_ipm(c, b, ns, opts, std::move(x0));
}

}  // namespace ds
