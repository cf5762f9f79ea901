#include "ds/calibration.hpp"

#include "ds/kernels.hpp"
#include "ds/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ds {

namespace {

void validate(const DesignMatrix& X, double sigma, double quantile, std::size_t draws) {
    if (X.X.rows == 0 || X.X.cols == 0) throw std::invalid_argument("calibration: empty design");
    if (!(sigma > 0.0)) throw std::invalid_argument("calibration: sigma must be positive");
    if (!(quantile > 0.0 && quantile < 1.0))
        throw std::invalid_argument("calibration: quantile must lie in (0, 1)");
    if (draws < 100) throw std::invalid_argument("calibration: need at least 100 draws");
}

// Statistic of one noise draw: max_i |X^T z|_i / (scale_i * sigma) with
// z ~ sigma * N(0, I).  Each draw owns a counter-derived seed, so results do
// not depend on evaluation order.
Vector draw_statistics(const DesignMatrix& X, double sigma, std::size_t draws,
                       std::uint64_t seed, const Vector* scale) {
    const std::size_t n = X.X.rows;
    Vector stats(draws, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t d = 0; d < static_cast<std::int64_t>(draws); ++d) {
        Rng rng(mix_seed(seed, static_cast<std::uint64_t>(d)));
        Vector z(n);
        for (std::size_t i = 0; i < n; ++i) z[i] = sigma * rng.normal();
        Vector corr = serial::mat_transpose_vec(X.X, z);
        double worst = 0.0;
        for (std::size_t j = 0; j < corr.size(); ++j) {
            double v = std::fabs(corr[j]) / sigma;
            if (scale) v /= (*scale)[j];
            worst = std::max(worst, v);
        }
        stats[static_cast<std::size_t>(d)] = worst;
    }
    return stats;
}

// The empirical quantile is the ceil(q * draws)-th smallest statistic.
CalibrationResult from_statistics(Vector stats, double sigma, double quantile) {
    std::sort(stats.begin(), stats.end());
    const double pos = std::ceil(quantile * static_cast<double>(stats.size()));
    std::size_t idx = static_cast<std::size_t>(pos);
    if (idx == 0) idx = 1;
    if (idx > stats.size()) idx = stats.size();
    const double value = stats[idx - 1];
    CalibrationResult out;
    out.lambda_p = value;
    out.lambda_sigma = value * sigma;
    out.quantile = quantile;
    out.draws = stats.size();
    out.sigma = sigma;
    const auto past = std::upper_bound(stats.begin(), stats.end(), value);
    out.empirical_cdf_at_lambda =
        static_cast<double>(past - stats.begin()) / static_cast<double>(stats.size());
    return out;
}

}  // namespace

CalibrationResult mc_lambda(const DesignMatrix& X, double sigma, double quantile,
                            std::size_t draws, std::uint64_t seed) {
    validate(X, sigma, quantile, draws);
    return from_statistics(draw_statistics(X, sigma, draws, seed, nullptr), sigma, quantile);
}

CalibrationResult mc_lambda_per_column(const DesignMatrix& X, double sigma, double quantile,
                                       std::size_t draws, std::uint64_t seed) {
    validate(X, sigma, quantile, draws);
    const std::size_t p = X.X.cols;
    Vector norms(p, 0.0);
    for (std::size_t j = 0; j < p; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < X.X.rows; ++i) {
            const double v = X.X(i, j);
            s += v * v;
        }
        if (s == 0.0)
            throw std::invalid_argument("calibration: zero column " + std::to_string(j));
        norms[j] = std::sqrt(s);
    }
    CalibrationResult out =
        from_statistics(draw_statistics(X, sigma, draws, seed, &norms), sigma, quantile);
    Vector levels(p);
    for (std::size_t j = 0; j < p; ++j) levels[j] = out.lambda_p * norms[j];
    out.per_column = std::move(levels);
    return out;
}

double analytic_lambda_orthonormal(std::size_t p, double quantile) {
    if (p == 0) throw std::invalid_argument("calibration: p must be positive");
    if (!(quantile > 0.0 && quantile < 1.0 - 1e-12))
        throw std::invalid_argument("calibration: quantile must lie in (0, 1 - 1e-12)");
    const double root = std::pow(quantile, 1.0 / static_cast<double>(p));
    return inverse_normal_cdf(0.5 * (1.0 + root));
}

// Wichura's algorithm AS241, PPND16 variant.
double inverse_normal_cdf(double prob) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::invalid_argument("inverse_normal_cdf: probability must lie in (0, 1)");
    const double q = prob - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) *
                     r +
                 4.5921953931549871457e4) *
                    r +
                1.3731693765509461125e4) *
                   r +
               1.9715909503065514427e3) *
                  r +
              1.3314166789178437745e2) *
                 r +
             3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) *
                     r +
                 2.1213794301586595867e4) *
                    r +
                5.3941960214247511077e3) *
                   r +
               6.8718700749205790830e2) *
                  r +
              4.2313330701600911252e1) *
                 r +
             1.0);
        return q * num / den;
    }
    double r = q < 0.0 ? prob : 1.0 - prob;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) *
                     r +
                 1.27045825245236838258e0) *
                    r +
                3.64784832476320460504e0) *
                   r +
               5.76949722146069140550e0) *
                  r +
              4.63033784615654529590e0) *
                 r +
             1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) *
                     r +
                 1.48103976427480074590e-1) *
                    r +
                6.89767334985100004550e-1) *
                   r +
               1.67638483018380384940e0) *
                  r +
              2.05319162663775882187e0) *
                 r +
             1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) *
                     r +
                 2.65321895265761230930e-2) *
                    r +
                2.96560571828504891230e-1) *
                   r +
               1.78482653991729133580e0) *
                  r +
              5.46378491116411436990e0) *
                 r +
             6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) *
                     r +
                 7.86869131145613259100e-4) *
                    r +
                1.48753612908506148525e-2) *
                   r +
               1.36929880922735805310e-1) *
                  r +
              5.99832206555887937690e-1) *
                 r +
             1.0);
        value = num / den;
    }
    return q < 0.0 ? -value : value;
}

}  // namespace ds
