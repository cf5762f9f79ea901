#include "ds/dantzig.hpp"
#include "ds/designs.hpp"
#include "ds/ipm.hpp"
#include "ds/kernels.hpp"
#include "ds/rng.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <cmath>

using namespace ds;

TEST_CASE("status names") {
    CHECK(to_string(LPStatus::optimal) == "optimal");
    CHECK(to_string(LPStatus::max_iters) == "max_iters");
    CHECK(to_string(LPStatus::numerical_failure) == "numerical_failure");
}

TEST_CASE("one-variable box program") {
    // min x subject to x <= 5, x >= 0
    LPProblem lp;
    lp.c = {1.0};
    lp.A = Matrix(1, 1);
    lp.A(0, 0) = 1.0;
    lp.b = {5.0};
    lp.nonneg_count = 1;
    LPSolution s = ipm_solve(lp);
    REQUIRE(s.status == LPStatus::optimal);
    CHECK(std::fabs(s.objective) <= 1e-7);
    CHECK(std::fabs(s.x[0]) <= 1e-7);
    CHECK(s.gap <= 1e-6);
}

TEST_CASE("maximization against the box bound") {
    // min -x subject to x <= 5, x >= 0: optimum at the upper bound
    LPProblem lp;
    lp.c = {-1.0};
    lp.A = Matrix(1, 1);
    lp.A(0, 0) = 1.0;
    lp.b = {5.0};
    lp.nonneg_count = 1;
    LPSolution s = ipm_solve(lp);
    REQUIRE(s.status == LPStatus::optimal);
    CHECK(s.objective == doctest::Approx(-5.0).epsilon(1e-7));
    CHECK(s.x[0] == doctest::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("infeasible program is reported, not solved") {
    // x >= 0 and x <= -1 cannot both hold
    LPProblem lp;
    lp.c = {1.0};
    lp.A = Matrix(1, 1);
    lp.A(0, 0) = 1.0;
    lp.b = {-1.0};
    lp.nonneg_count = 1;
    LPSolution s = ipm_solve(lp);
    CHECK(s.status != LPStatus::optimal);
}

TEST_CASE("free variable reaches a negative optimum") {
    // min x subject to -x <= 3 with x free: optimum -3
    LPProblem lp;
    lp.c = {1.0};
    lp.A = Matrix(1, 1);
    lp.A(0, 0) = -1.0;
    lp.b = {3.0};
    lp.nonneg_count = 0;
    LPSolution s = ipm_solve(lp);
    REQUIRE(s.status == LPStatus::optimal);
    CHECK(s.objective == doctest::Approx(-3.0).epsilon(1e-7));
    CHECK(s.x[0] == doctest::Approx(-3.0).epsilon(1e-7));
}

TEST_CASE("two-variable program with a known corner") {
    // min -x1 - 2 x2  s.t.  x1 + x2 <= 4,  x2 <= 3,  x >= 0
    // optimum at (1, 3), objective -7
    LPProblem lp;
    lp.c = {-1.0, -2.0};
    lp.A = Matrix(2, 2);
    lp.A(0, 0) = 1.0;
    lp.A(0, 1) = 1.0;
    lp.A(1, 0) = 0.0;
    lp.A(1, 1) = 1.0;
    lp.b = {4.0, 3.0};
    lp.nonneg_count = 2;
    LPSolution s = ipm_solve(lp);
    REQUIRE(s.status == LPStatus::optimal);
    CHECK(s.objective == doctest::Approx(-7.0).epsilon(1e-7));
    CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(s.x[1] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("random bounded programs match exhaustive vertex search") {
    int solved = 0;
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        Rng rng(seed);
        const std::size_t nv = 2 + rng.below(3);   // 2..4 variables
        const std::size_t m = 3 + rng.below(4);    // 3..6 rows plus the cap row
        Matrix A(m + 1, nv);
        Vector b(m + 1);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < nv; ++j) A(i, j) = 2.0 * rng.uniform01() - 1.0;
            b[i] = 0.5 + 1.5 * rng.uniform01();  // origin stays feasible
        }
        for (std::size_t j = 0; j < nv; ++j) A(m, j) = 1.0;  // simplex cap keeps it bounded
        b[m] = 3.0;
        Vector c(nv);
        for (auto& v : c) v = 2.0 * rng.uniform01() - 1.0;

        auto oracle = testutil::lp_enumerate(c, A, b);
        REQUIRE(oracle.has_value());

        LPProblem lp{c, A, b, nv};
        LPSolution s = ipm_solve(lp);
        REQUIRE(s.status == LPStatus::optimal);
        CHECK(std::fabs(s.objective - *oracle) <= 1e-8 * (1.0 + std::fabs(*oracle)));
        ++solved;
    }
    CHECK(solved == 25);
}

TEST_CASE("solutions satisfy their constraints at exit") {
    Rng rng(99);
    const std::size_t nv = 4, m = 6;
    Matrix A(m, nv);
    Vector b(m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < nv; ++j) A(i, j) = rng.normal();
        b[i] = 1.0 + rng.uniform01();
    }
    Vector c(nv);
    for (auto& v : c) v = rng.uniform01();  // nonnegative cost keeps it bounded
    LPProblem lp{c, A, b, nv};
    LPSolution s = ipm_solve(lp);
    REQUIRE(s.status == LPStatus::optimal);
    for (std::size_t j = 0; j < nv; ++j) CHECK(s.x[j] >= -1e-8);
    for (std::size_t i = 0; i < m; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < nv; ++j) lhs += A(i, j) * s.x[j];
        CHECK(lhs <= b[i] + 1e-6 * (1.0 + std::fabs(b[i])));
    }
    CHECK(s.primal_infeas <= 1e-8);
    CHECK(s.dual_infeas <= 1e-8);
}

TEST_CASE("selector route agrees with the generic dense route") {
    for (std::uint64_t seed = 5; seed <= 10; ++seed) {
        DesignMatrix d = gen_gaussian(12, 6, seed);
        Rng rng(seed + 100);
        Vector y(12);
        for (auto& v : y) v = rng.normal();
        DSOptions opts;
        opts.lambda_sigma = 0.4;
        LPProblem lp = assemble_ds_lp(d, y, opts);

        LPSolution generic = ipm_solve(lp);
        Matrix G = gram(d.X);
        LPSolution special = ipm_solve_selector(lp.c, lp.b, d.X, G);
        REQUIRE(generic.status == LPStatus::optimal);
        REQUIRE(special.status == LPStatus::optimal);
        CHECK(std::fabs(generic.objective - special.objective) <=
              1e-7 * (1.0 + std::fabs(generic.objective)));
    }
}

TEST_CASE("selector route with a wide design agrees with enumeration") {
    for (std::uint64_t seed = 30; seed <= 37; ++seed) {
        DesignMatrix d = gen_gaussian(3, 4, seed);  // n < p exercises the small-side path
        Rng rng(seed + 1);
        Vector y(3);
        for (auto& v : y) v = rng.normal();
        DSOptions opts;
        opts.lambda_sigma = 0.3;
        LPProblem lp = assemble_ds_lp(d, y, opts);

        auto oracle = testutil::lp_enumerate(lp.c, lp.A, lp.b);
        REQUIRE(oracle.has_value());
        Matrix G = gram(d.X);
        LPSolution s = ipm_solve_selector(lp.c, lp.b, d.X, G);
        REQUIRE(s.status == LPStatus::optimal);
        CHECK(std::fabs(s.objective - *oracle) <= 1e-8 * (1.0 + std::fabs(*oracle)));
    }
}

TEST_CASE("a primal start hint does not change the optimum") {
    DesignMatrix d = gen_gaussian(10, 5, 77);
    Rng rng(78);
    Vector y(10);
    for (auto& v : y) v = rng.normal();
    DSOptions opts;
    opts.lambda_sigma = 0.5;
    LPProblem lp = assemble_ds_lp(d, y, opts);
    Matrix G = gram(d.X);
    LPSolution plain = ipm_solve_selector(lp.c, lp.b, d.X, G);
    Vector hint(lp.c.size(), 0.25);
    LPSolution hinted = ipm_solve_selector(lp.c, lp.b, d.X, G, {}, &hint);
    REQUIRE(plain.status == LPStatus::optimal);
    REQUIRE(hinted.status == LPStatus::optimal);
    CHECK(std::fabs(plain.objective - hinted.objective) <=
          1e-7 * (1.0 + std::fabs(plain.objective)));
}

TEST_CASE("iteration cap is honored and flagged") {
    LPProblem lp;
    lp.c = {-1.0, -2.0};
    lp.A = Matrix(2, 2);
    lp.A(0, 0) = 1.0;
    lp.A(0, 1) = 1.0;
    lp.A(1, 1) = 1.0;
    lp.b = {4.0, 3.0};
    lp.nonneg_count = 2;
    IpmOptions opts;
    opts.max_iters = 1;
    LPSolution s = ipm_solve(lp, opts);
    CHECK(s.status == LPStatus::max_iters);
    CHECK(s.iterations <= 1);
}
