#include "ds/designs.hpp"

#include "ds/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ds {

std::string to_string(DesignKind k) {
    switch (k) {
        case DesignKind::gaussian: return "gaussian";
        case DesignKind::bernoulli: return "bernoulli";
        case DesignKind::partial_fourier: return "partial_fourier";
        case DesignKind::identity_fourier: return "identity_fourier";
        case DesignKind::file: return "file";
    }
    return "?";
}

DesignKind design_kind_from_string(const std::string& s) {
    if (s == "gaussian") return DesignKind::gaussian;
    if (s == "bernoulli") return DesignKind::bernoulli;
    if (s == "partial_fourier" || s == "partial-fourier") return DesignKind::partial_fourier;
    if (s == "identity_fourier" || s == "identity-fourier") return DesignKind::identity_fourier;
    if (s == "file") return DesignKind::file;
    throw std::invalid_argument("unknown design kind '" + s + "'");
}

std::string to_string(AmplitudeRule r) {
    return r == AmplitudeRule::gaussian_unit ? "gaussian_unit" : "signed_constant";
}

AmplitudeRule amplitude_rule_from_string(const std::string& s) {
    if (s == "gaussian_unit" || s == "gaussian-unit") return AmplitudeRule::gaussian_unit;
    if (s == "signed_constant" || s == "signed-constant") return AmplitudeRule::signed_constant;
    throw std::invalid_argument("unknown amplitude rule '" + s + "'");
}

namespace {

Vector column_norms_of(const Matrix& X) {
    Vector norms(X.cols, 0.0);
    for (std::size_t j = 0; j < X.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) s += X(i, j) * X(i, j);
        norms[j] = std::sqrt(s);
    }
    return norms;
}

void check_dims(std::size_t n, std::size_t p) {
    if (n == 0 || p == 0) throw std::invalid_argument("design dimensions must be positive");
}

// Real trigonometric dictionary with p columns evaluated at the given times
// on a length-p grid: constant, cos/sin pairs for frequencies 1..(p-1)/2,
// and the half-grid cosine when p is even. Columns are unit-normalized over
// the provided rows. Returns false if any column is numerically zero.
bool build_trig_columns(const std::vector<std::size_t>& times, std::size_t p, Matrix& X,
                        std::size_t col_offset) {
    const std::size_t n = times.size();
    const double base = 2.0 * std::numbers::pi / static_cast<double>(p);
    std::size_t col = col_offset;
    auto fill = [&](auto&& f) {
        for (std::size_t i = 0; i < n; ++i) X(i, col) = f(static_cast<double>(times[i]));
        ++col;
    };
    fill([&](double) { return 1.0; });
    for (std::size_t f = 1; 2 * f + 1 <= p; ++f) {
        const double w = base * static_cast<double>(f);
        fill([&](double t) { return std::cos(w * t); });
        fill([&](double t) { return std::sin(w * t); });
    }
    if (p % 2 == 0) {
        const double w = base * static_cast<double>(p / 2);
        fill([&](double t) { return std::cos(w * t); });
    }
    for (std::size_t j = col_offset; j < col; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += X(i, j) * X(i, j);
        const double norm = std::sqrt(s);
        if (!(norm > 1e-14 * std::sqrt(static_cast<double>(n)))) return false;
        for (std::size_t i = 0; i < n; ++i) X(i, j) /= norm;
    }
    return true;
}

}  // namespace

DesignMatrix gen_gaussian(std::size_t n, std::size_t p, std::uint64_t seed) {
    check_dims(n, p);
    Rng rng(seed);
    Matrix X(n, p);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) X(i, j) = scale * rng.normal();
    DesignMatrix d{std::move(X), {}, DesignKind::gaussian, seed};
    d.column_norms = column_norms_of(d.X);
    return d;
}

DesignMatrix gen_bernoulli(std::size_t n, std::size_t p, std::uint64_t seed) {
    check_dims(n, p);
    Rng rng(seed);
    Matrix X(n, p);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            X(i, j) = rng.uniform01() < 0.5 ? scale : -scale;
    DesignMatrix d{std::move(X), {}, DesignKind::bernoulli, seed};
    d.column_norms = column_norms_of(d.X);
    return d;
}

DesignMatrix gen_partial_fourier(std::size_t n, std::size_t p, std::uint64_t seed) {
    check_dims(n, p);
    if (n > p) throw std::invalid_argument("gen_partial_fourier: requires n <= p");
    // A sampled sine column can vanish on unlucky time draws; redraw the
    // times deterministically until every column survives normalization.
    for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
        Rng rng(mix_seed(seed, attempt));
        auto times = rng.sample_without_replacement(p, n);
        Matrix X(n, p);
        if (!build_trig_columns(times, p, X, 0)) continue;
        DesignMatrix d{std::move(X), {}, DesignKind::partial_fourier, seed};
        d.column_norms = column_norms_of(d.X);
        return d;
    }
    throw std::runtime_error("gen_partial_fourier: degenerate column after 100 redraws");
}

DesignMatrix gen_identity_fourier(std::size_t n) {
    if (n < 4) throw std::invalid_argument("gen_identity_fourier: requires n >= 4");
    Matrix X(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) X(i, i) = 1.0;
    std::vector<std::size_t> times(n);
    for (std::size_t i = 0; i < n; ++i) times[i] = i;
    if (!build_trig_columns(times, n, X, n))
        throw std::runtime_error("gen_identity_fourier: degenerate trig column");
    DesignMatrix d{std::move(X), Vector(2 * n, 1.0), DesignKind::identity_fourier, 0};
    return d;
}

DesignMatrix design_from_matrix(Matrix X) {
    if (X.rows == 0 || X.cols == 0) throw std::invalid_argument("design_from_matrix: empty");
    if (!all_finite(X)) throw std::invalid_argument("design_from_matrix: non-finite entry");
    DesignMatrix d{std::move(X), {}, DesignKind::file, 0};
    d.column_norms = column_norms_of(d.X);
    return d;
}

SparseTruth gen_sparse_truth(std::size_t p, std::size_t sparsity, AmplitudeRule rule,
                             double amplitude, std::uint64_t seed) {
    if (p == 0) throw std::invalid_argument("gen_sparse_truth: p must be positive");
    if (sparsity > p) throw std::invalid_argument("gen_sparse_truth: sparsity exceeds p");
    if (rule == AmplitudeRule::signed_constant && !(amplitude > 0.0))
        throw std::invalid_argument("gen_sparse_truth: amplitude must be positive");
    Rng rng(seed);
    SparseTruth t;
    t.beta.assign(p, 0.0);
    t.support = rng.sample_without_replacement(p, sparsity);
    t.sparsity = sparsity;
    t.amplitude_rule = rule;
    t.amplitude = amplitude;
    for (std::size_t k : t.support) {
        double v;
        if (rule == AmplitudeRule::gaussian_unit) {
            do {
                v = rng.normal();
            } while (std::fabs(v) < 1e-6);
        } else {
            v = rng.uniform01() < 0.5 ? amplitude : -amplitude;
        }
        t.beta[k] = v;
    }
    return t;
}

DesignMatrix normalize_columns(const DesignMatrix& d) {
    DesignMatrix out = d;
    Vector norms = column_norms_of(d.X);
    for (std::size_t j = 0; j < norms.size(); ++j) {
        if (!(norms[j] > 0.0) || norms[j] < 1e-300)
            throw std::invalid_argument("normalize_columns: zero column " + std::to_string(j));
        for (std::size_t i = 0; i < out.X.rows; ++i) out.X(i, j) /= norms[j];
    }
    out.column_norms = std::move(norms);
    return out;
}

}  // namespace ds
