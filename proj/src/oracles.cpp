#include "ds/oracles.hpp"

#include "ds/kernels.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ds {

namespace {

IndexSet mask_to_support(std::uint32_t mask) {
    IndexSet out;
    while (mask) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
        mask &= mask - 1;
    }
    return out;
}

// Ascending support lists compared elementwise; used only between equal-value,
// equal-size candidates, so the lists run out together.
bool lex_less(std::uint32_t a, std::uint32_t b) {
    while (a != 0 && b != 0) {
        const int la = std::countr_zero(a);
        const int lb = std::countr_zero(b);
        if (la != lb) return la < lb;
        a &= a - 1;
        b &= b - 1;
    }
    return a == 0 && b != 0;
}

struct Candidate {
    double value = std::numeric_limits<double>::infinity();
    std::uint32_t mask = 0;
    bool valid = false;
};

bool better(const Candidate& a, const Candidate& b) {
    if (!a.valid || !b.valid) return a.valid;
    if (a.value != b.value) return a.value < b.value;
    const int ca = std::popcount(a.mask);
    const int cb = std::popcount(b.mask);
    if (ca != cb) return ca < cb;
    return lex_less(a.mask, b.mask);
}

// Residual sum of squares after least squares of `target` on the listed
// columns. SingularSubsetError propagates to the caller.
double subset_rss(const Matrix& X, const Vector& target, const IndexSet& support) {
    if (support.empty()) {
        double s = 0.0;
        for (double v : target) s += v * v;
        return s;
    }
    const Vector fit = least_squares(X, target, support);
    Vector pred = serial::mat_vec(X, fit);
    double s = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
        const double d = target[i] - pred[i];
        s += d * d;
    }
    return s;
}

// Scans all 2^p subsets for the one minimizing value(support); singular
// subsets are skipped. The minimum under the (value, size, lex) order is the
// same no matter how the masks are partitioned across threads.
template <typename ValueFn>
Candidate scan_subsets(std::size_t p, std::size_t max_p, ValueFn&& value) {
    if (p > max_p || p > 25) throw ExhaustiveSearchError(p, std::min<std::size_t>(max_p, 25));
    const std::uint64_t total = std::uint64_t{1} << p;
    Candidate best;
#pragma omp parallel
    {
        Candidate local;
#pragma omp for schedule(dynamic, 256) nowait
        for (std::int64_t m = 0; m < static_cast<std::int64_t>(total); ++m) {
            const std::uint32_t mask = static_cast<std::uint32_t>(m);
            Candidate cand;
            cand.mask = mask;
            try {
                cand.value = value(mask_to_support(mask));
                cand.valid = true;
            } catch (const SingularSubsetError&) {
                continue;
            }
            if (better(cand, local)) local = cand;
        }
#pragma omp critical
        {
            if (better(local, best)) best = local;
        }
    }
    return best;
}

struct TwoStage {
    Vector beta;
    IndexSet support;
    double half_rss = 0.0;
};

// Thresholds the stage-1 estimate and refits; a singular refit drops the
// surviving index with the smallest stage-1 magnitude and retries.
TwoStage threshold_and_refit(const Matrix& X, const Vector& y, const Vector& stage1,
                             std::optional<double> tau) {
    const double cut = tau ? *tau : 1e-3 * std::max(1.0, norm_inf(stage1));
    IndexSet support;
    for (std::size_t i = 0; i < stage1.size(); ++i)
        if (std::fabs(stage1[i]) > cut) support.push_back(i);

    TwoStage out;
    for (;;) {
        if (support.empty()) {
            out.beta = Vector(stage1.size(), 0.0);
            break;
        }
        try {
            out.beta = least_squares(X, y, support);
            break;
        } catch (const SingularSubsetError&) {
            std::size_t drop = 0;
            for (std::size_t k = 1; k < support.size(); ++k)
                if (std::fabs(stage1[support[k]]) < std::fabs(stage1[support[drop]])) drop = k;
            support.erase(support.begin() + static_cast<std::ptrdiff_t>(drop));
        }
    }
    out.support = support;
    Vector pred = serial::mat_vec(X, out.beta);
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - pred[i];
        s += d * d;
    }
    out.half_rss = 0.5 * s;
    return out;
}

Estimate finish_two_stage(Estimate stage1_est, const Matrix& X, const Vector& y,
                          std::optional<double> tau, const char* name,
                          std::chrono::steady_clock::time_point t0) {
    TwoStage ts = threshold_and_refit(X, y, stage1_est.beta, tau);
    Estimate est = std::move(stage1_est);
    est.raw_beta = std::move(est.beta);
    est.beta = std::move(ts.beta);
    est.objective = ts.half_rss;
    est.solver = name;
    est.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return est;
}

}  // namespace

SubsetRisk subset_prediction_risk(const DesignMatrix& X, const Vector& beta_true, double sigma,
                                  const IndexSet& support) {
    if (beta_true.size() != X.X.cols) throw DimensionError("subset risk: beta length != cols");
    if (!(sigma >= 0.0)) throw std::invalid_argument("subset risk: sigma must be nonnegative");
    const Vector target = serial::mat_vec(X.X, beta_true);
    SubsetRisk out;
    out.subset = support;
    out.bias_sq = subset_rss(X.X, target, support);
    out.variance = sigma * sigma * static_cast<double>(support.size());
    out.total = out.bias_sq + out.variance;
    return out;
}

IdealRisk ideal_risk(const DesignMatrix& X, const Vector& beta_true, double sigma,
                     std::size_t max_p) {
    if (beta_true.size() != X.X.cols) throw DimensionError("ideal risk: beta length != cols");
    if (!(sigma >= 0.0)) throw std::invalid_argument("ideal risk: sigma must be nonnegative");
    const Vector target = serial::mat_vec(X.X, beta_true);
    const double var = sigma * sigma;
    Candidate best = scan_subsets(X.X.cols, max_p, [&](const IndexSet& support) {
        return subset_rss(X.X, target, support) + var * static_cast<double>(support.size());
    });
    IdealRisk out;
    out.risk = best.value;
    out.subset = mask_to_support(best.mask);
    return out;
}

double ideal_bound(const Vector& beta_true, double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("ideal bound: sigma must be nonnegative");
    const double var = sigma * sigma;
    double s = var;
    for (double b : beta_true) s += std::min(b * b, var);
    return s;
}

Estimate canonical_selection(const DesignMatrix& X, const Vector& y, double sigma,
                             double lambda_p, std::size_t max_p) {
    const auto t0 = std::chrono::steady_clock::now();
    if (y.size() != X.X.rows) throw DimensionError("canonical selection: y length != rows");
    if (!(sigma >= 0.0))
        throw std::invalid_argument("canonical selection: sigma must be nonnegative");
    if (!(lambda_p >= 0.0))
        throw std::invalid_argument("canonical selection: penalty must be nonnegative");
    const double var = sigma * sigma;
    Candidate best = scan_subsets(X.X.cols, max_p, [&](const IndexSet& support) {
        return subset_rss(X.X, y, support) + lambda_p * var * static_cast<double>(support.size());
    });
    const IndexSet subset = mask_to_support(best.mask);
    Estimate est;
    est.solver = "canonical";
    est.beta = subset.empty() ? Vector(X.X.cols, 0.0) : least_squares(X.X, y, subset);
    est.raw_beta = est.beta;
    est.objective = best.value;
    est.iterations = std::size_t{1} << X.X.cols;
    est.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return est;
}

Estimate gauss_dantzig(const DesignMatrix& X, const Vector& y, const DSOptions& opts,
                       std::optional<double> tau) {
    const auto t0 = std::chrono::steady_clock::now();
    return finish_two_stage(solve_ds(X, y, opts), X.X, y, tau, "gauss_dantzig", t0);
}

Estimate gauss_lasso(const DesignMatrix& X, const Vector& y, const LassoOptions& opts,
                     std::optional<double> tau) {
    const auto t0 = std::chrono::steady_clock::now();
    return finish_two_stage(solve_lasso_penalized(X, y, opts), X.X, y, tau, "gauss_lasso", t0);
}

Vector refit_on_support(const DesignMatrix& X, const Vector& y, const IndexSet& support) {
    if (support.empty()) return Vector(X.X.cols, 0.0);
    return least_squares(X.X, y, support);
}

IndexSet estimated_support(const Vector& beta) {
    const double cut = 1e-8 * std::max(1.0, norm_inf(beta));
    IndexSet out;
    for (std::size_t i = 0; i < beta.size(); ++i)
        if (std::fabs(beta[i]) > cut) out.push_back(i);
    return out;
}

Metrics evaluate(const Vector& beta_hat, const SparseTruth& truth, const DesignMatrix& X) {
    if (beta_hat.size() != X.X.cols || truth.beta.size() != X.X.cols)
        throw DimensionError("evaluate: beta length != cols");
    Metrics m;
    Vector diff(beta_hat.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = beta_hat[i] - truth.beta[i];
    const double err = norm2(diff);
    const double truth_norm = norm2(truth.beta);
    m.rel_l2_error = truth_norm > 0.0 ? err / truth_norm : (norm2(beta_hat) > 0.0 ? 1.0 : 0.0);
    m.mse = err * err / static_cast<double>(diff.size());
    const Vector pd = serial::mat_vec(X.X, diff);
    double ps = 0.0;
    for (double v : pd) ps += v * v;
    m.pred_error = ps;

    const IndexSet est = estimated_support(beta_hat);
    const IndexSet& tru = truth.support;
    std::size_t hits = 0;
    for (std::size_t i : est)
        if (std::binary_search(tru.begin(), tru.end(), i)) ++hits;
    m.support_precision =
        est.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(est.size());
    m.support_recall =
        tru.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(tru.size());
    return m;
}

}  // namespace ds
