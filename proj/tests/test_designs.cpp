#include "ds/designs.hpp"
#include "ds/kernels.hpp"
#include "ds/linalg.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace ds;

TEST_CASE("kind and rule names round trip") {
    for (auto k : {DesignKind::gaussian, DesignKind::bernoulli, DesignKind::partial_fourier,
                   DesignKind::identity_fourier, DesignKind::file})
        CHECK(design_kind_from_string(to_string(k)) == k);
    CHECK(design_kind_from_string("partial-fourier") == DesignKind::partial_fourier);
    CHECK_THROWS(design_kind_from_string("fourier"));
    for (auto r : {AmplitudeRule::gaussian_unit, AmplitudeRule::signed_constant})
        CHECK(amplitude_rule_from_string(to_string(r)) == r);
    CHECK_THROWS(amplitude_rule_from_string("constant"));
}

TEST_CASE("gaussian columns concentrate near unit norm") {
    int within = 0;
    const int trials = 1000;
    for (int seed = 0; seed < trials; ++seed) {
        DesignMatrix d = gen_gaussian(100, 1, static_cast<std::uint64_t>(seed));
        REQUIRE(d.column_norms.size() == 1);
        double nrm = d.column_norms[0];
        CHECK(nrm > 0.0);
        if (nrm >= 0.7 && nrm <= 1.3) ++within;
    }
    CHECK(within >= 990);
}

TEST_CASE("gaussian design is seed-deterministic") {
    DesignMatrix a = gen_gaussian(20, 15, 5);
    DesignMatrix b = gen_gaussian(20, 15, 5);
    DesignMatrix c = gen_gaussian(20, 15, 6);
    CHECK(a.X.a == b.X.a);
    CHECK(a.X.a != c.X.a);
}

TEST_CASE("bernoulli entries use the two-point alphabet") {
    DesignMatrix d = gen_bernoulli(8, 8, 3);
    const double v = 1.0 / std::sqrt(8.0);
    bool saw_plus = false, saw_minus = false;
    for (double x : d.X.a) {
        CHECK((x == v || x == -v));
        if (x == v) saw_plus = true;
        if (x == -v) saw_minus = true;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);
    for (double nrm : d.column_norms) CHECK(nrm == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("full-grid trig dictionary is orthonormal") {
    for (std::size_t p : {8u, 9u, 12u}) {
        DesignMatrix d = gen_partial_fourier(p, p, 17);
        Matrix G = gram(d.X);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < p; ++j)
                CHECK(std::fabs(G(i, j) - (i == j ? 1.0 : 0.0)) <= 1e-10);
    }
}

TEST_CASE("partial trig design has unit columns and is deterministic") {
    DesignMatrix a = gen_partial_fourier(12, 30, 9);
    DesignMatrix b = gen_partial_fourier(12, 30, 9);
    CHECK(a.X.a == b.X.a);
    REQUIRE(a.X.rows == 12);
    REQUIRE(a.X.cols == 30);
    for (std::size_t j = 0; j < 30; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 12; ++i) s += a.X(i, j) * a.X(i, j);
        CHECK(std::sqrt(s) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS(gen_partial_fourier(10, 5, 1));
}

TEST_CASE("identity plus trig concatenation has unit columns") {
    DesignMatrix d = gen_identity_fourier(16);
    REQUIRE(d.X.rows == 16);
    REQUIRE(d.X.cols == 32);
    for (std::size_t j = 0; j < 32; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 16; ++i) s += d.X(i, j) * d.X(i, j);
        CHECK(std::sqrt(s) == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(d.column_norms == Vector(32, 1.0));
    CHECK_THROWS(gen_identity_fourier(3));
}

// A spike comb in the identity half equals a three-column combination in the
// trig half, so the concatenated dictionary carries an exact linear
// dependence. Verified coefficientwise here, and below as a singular subset.
TEST_CASE("spike comb equals its trig expansion, 16 points") {
    DesignMatrix d = gen_identity_fourier(16);
    const std::size_t col_const = 16, col_cos4 = 23, col_sin4 = 24, col_cos8 = 31;
    Vector w(32, 0.0);
    w[0] = w[4] = w[8] = w[12] = 1.0;
    w[col_const] = -1.0;
    w[col_cos4] = -std::sqrt(2.0);
    w[col_cos8] = -1.0;
    Vector r = mat_vec(d.X, w);
    CHECK(norm_inf(r) <= 1e-12);

    // eight columns containing that dependence form a singular subset
    IndexSet dep{0, 4, 8, 12, col_const, col_cos4, col_sin4, col_cos8};
    std::sort(dep.begin(), dep.end());
    Vector y(16, 1.0);
    CHECK_THROWS_AS(least_squares(d.X, y, dep), SingularSubsetError);
}

TEST_CASE("spike comb equals its trig expansion, 64 points") {
    DesignMatrix d = gen_identity_fourier(64);
    Vector w(128, 0.0);
    for (std::size_t t = 0; t < 64; t += 8) w[t] = 1.0;
    w[64] = -1.0;                         // constant column
    w[63 + 2 * 8] = -std::sqrt(2.0);      // cos, frequency 8
    w[63 + 2 * 16] = -std::sqrt(2.0);     // cos, frequency 16
    w[63 + 2 * 24] = -std::sqrt(2.0);     // cos, frequency 24
    w[127] = -1.0;                        // half-grid cosine
    Vector r = mat_vec(d.X, w);
    CHECK(norm_inf(r) <= 1e-10);
}

TEST_CASE("design_from_matrix records the actual norms") {
    Matrix X(2, 2);
    X(0, 0) = 3.0;
    X(1, 1) = 4.0;
    DesignMatrix d = design_from_matrix(X);
    CHECK(d.kind == DesignKind::file);
    CHECK(d.column_norms == Vector{3.0, 4.0});
    Matrix bad(1, 1);
    bad(0, 0) = std::nan("");
    CHECK_THROWS(design_from_matrix(bad));
}

TEST_CASE("normalize_columns divides and keeps the old norms") {
    Matrix X(2, 2);
    X(0, 0) = 3.0;
    X(1, 1) = 4.0;
    DesignMatrix d = normalize_columns(design_from_matrix(X));
    CHECK(d.X(0, 0) == 1.0);
    CHECK(d.X(1, 1) == 1.0);
    CHECK(d.column_norms == Vector{3.0, 4.0});

    // unit columns are untouched
    DesignMatrix unit = gen_bernoulli(16, 10, 2);
    DesignMatrix renorm = normalize_columns(unit);
    CHECK(testutil::max_abs_diff(renorm.X.a, unit.X.a) <= 1e-15);

    Matrix Z(2, 2);
    Z(0, 0) = 1.0;  // second column all zero
    try {
        normalize_columns(design_from_matrix(Z));
        FAIL("expected zero-column rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("column 1") != std::string::npos);
    }
}

TEST_CASE("sparse truth respects support size and amplitude rule") {
    SparseTruth t = gen_sparse_truth(50, 10, AmplitudeRule::gaussian_unit, 1.0, 21);
    REQUIRE(t.beta.size() == 50);
    REQUIRE(t.support.size() == 10);
    CHECK(std::is_sorted(t.support.begin(), t.support.end()));
    std::set<std::size_t> sup(t.support.begin(), t.support.end());
    CHECK(sup.size() == 10);
    for (std::size_t j = 0; j < 50; ++j) {
        if (sup.count(j)) {
            CHECK(std::fabs(t.beta[j]) >= 1e-6);
        } else {
            CHECK(t.beta[j] == 0.0);
        }
    }

    SparseTruth s = gen_sparse_truth(40, 8, AmplitudeRule::signed_constant, 2.5, 22);
    bool plus = false, minus = false;
    for (std::size_t j : s.support) {
        CHECK(std::fabs(s.beta[j]) == 2.5);
        (s.beta[j] > 0 ? plus : minus) = true;
    }
    CHECK(plus);
    CHECK(minus);

    SparseTruth same = gen_sparse_truth(40, 8, AmplitudeRule::signed_constant, 2.5, 22);
    CHECK(same.beta == s.beta);

    SparseTruth empty = gen_sparse_truth(10, 0, AmplitudeRule::gaussian_unit, 1.0, 1);
    CHECK(empty.support.empty());
    CHECK(norm_inf(empty.beta) == 0.0);

    CHECK_THROWS(gen_sparse_truth(5, 6, AmplitudeRule::gaussian_unit, 1.0, 1));
    CHECK_THROWS(gen_sparse_truth(5, 2, AmplitudeRule::signed_constant, 0.0, 1));
}
