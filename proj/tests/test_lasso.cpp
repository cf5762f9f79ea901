#include "ds/designs.hpp"
#include "ds/kernels.hpp"
#include "ds/lasso.hpp"
#include "ds/linalg.hpp"
#include "ds/rng.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <cmath>

using namespace ds;

namespace {

Vector noisy_sparse_response(const DesignMatrix& d, const SparseTruth& t, double sigma,
                             std::uint64_t seed) {
    Rng rng(seed);
    Vector y = serial::mat_vec(d.X, t.beta);
    for (auto& v : y) v += sigma * rng.normal();
    return y;
}

}  // namespace

TEST_CASE("penalized identity case soft-thresholds the data") {
    DesignMatrix d = design_from_matrix(Matrix::identity(2));
    Vector y{3.0, 0.5};
    LassoOptions opts;
    opts.lambda = 1.0;
    Estimate est = solve_lasso_penalized(d, y, opts);
    REQUIRE(est.status == "ok");
    CHECK(std::fabs(est.beta[0] - 2.0) <= 1e-6);
    CHECK(std::fabs(est.beta[1]) <= 1e-6);
    CHECK(est.solver == "lasso");
    // objective: 0.5*(1 + 0.25) + 1*2 = 2.625
    CHECK(est.objective == doctest::Approx(2.625).epsilon(1e-8));
}

TEST_CASE("a dominating penalty yields exactly zero") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        DesignMatrix d = gen_gaussian(20, 10, seed);
        Rng rng(seed + 50);
        Vector y(20);
        for (auto& v : y) v = rng.normal();
        double top = norm_inf(serial::mat_transpose_vec(d.X, y));
        LassoOptions opts;
        opts.lambda = top * 1.000001;
        Estimate est = solve_lasso_penalized(d, y, opts);
        CHECK(norm_inf(est.beta) == 0.0);
    }
}

TEST_CASE("zero penalty on a tall design recovers least squares") {
    DesignMatrix d = gen_gaussian(30, 8, 7);
    Rng rng(8);
    Vector y(30);
    for (auto& v : y) v = rng.normal();
    LassoOptions opts;
    opts.lambda = 0.0;
    Estimate est = solve_lasso_penalized(d, y, opts);
    REQUIRE(est.status == "ok");
    IndexSet full(8);
    for (std::size_t j = 0; j < 8; ++j) full[j] = j;
    Vector ls = least_squares(d.X, y, full);
    CHECK(testutil::max_abs_diff(est.beta, ls) <= 1e-6);
}

TEST_CASE("coordinate descent never increases the objective") {
    DesignMatrix d = gen_gaussian(25, 40, 11);
    SparseTruth t = gen_sparse_truth(40, 6, AmplitudeRule::gaussian_unit, 1.0, 12);
    Vector y = noisy_sparse_response(d, t, 0.5, 13);
    LassoTrace trace;
    LassoOptions opts;
    opts.lambda = 0.2;
    opts.trace = &trace;
    Estimate est = solve_lasso_penalized(d, y, opts);
    REQUIRE(est.status == "ok");
    REQUIRE(trace.objectives.size() >= 2);
    for (std::size_t k = 1; k < trace.objectives.size(); ++k)
        CHECK(trace.objectives[k] <= trace.objectives[k - 1] + 1e-12);
    CHECK(est.feasibility_residual <= 1e-6 * (1.0 + 0.2));
}

TEST_CASE("projection onto the l1 ball") {
    CHECK(project_l1_ball(Vector{3.0, 0.5}, 1.0) == Vector{1.0, 0.0});
    CHECK(project_l1_ball(Vector{0.3, -0.2}, 1.0) == Vector{0.3, -0.2});
    CHECK(project_l1_ball(Vector{5.0, -4.0}, 0.0) == Vector{0.0, 0.0});
    CHECK_THROWS(project_l1_ball(Vector{1.0}, -1.0));

    Rng rng(17);
    for (int rep = 0; rep < 40; ++rep) {
        Vector v(1 + rng.below(12));
        for (auto& x : v) x = 4.0 * (rng.uniform01() - 0.5);
        double t = 2.0 * rng.uniform01() + 1e-3;
        Vector got = project_l1_ball(v, t);
        Vector want = testutil::project_l1_bisect(v, t);
        CHECK(testutil::max_abs_diff(got, want) <= 1e-9);
        CHECK(norm1(got) <= t + 1e-10);
        // projecting twice changes nothing
        CHECK(testutil::max_abs_diff(project_l1_ball(got, t), got) <= 1e-12);
    }
}

TEST_CASE("constrained identity case lands on the ball boundary") {
    DesignMatrix d = design_from_matrix(Matrix::identity(2));
    Vector y{3.0, 0.5};
    LassoOptions opts;
    opts.t_budget = 1.0;
    Estimate est = solve_lasso_constrained(d, y, opts);
    REQUIRE(est.status == "ok");
    CHECK(std::fabs(est.beta[0] - 1.0) <= 1e-6);
    CHECK(std::fabs(est.beta[1]) <= 1e-6);
    CHECK(est.solver == "lasso_constrained");
    CHECK(est.feasibility_residual <= 1e-10);
}

TEST_CASE("a zero budget returns the zero fit") {
    DesignMatrix d = gen_gaussian(10, 4, 19);
    Vector y(10, 1.0);
    LassoOptions opts;
    opts.t_budget = 0.0;
    Estimate est = solve_lasso_constrained(d, y, opts);
    CHECK(norm_inf(est.beta) == 0.0);
    CHECK(est.objective == doctest::Approx(0.5 * dot(y, y)));
}

TEST_CASE("a generous budget recovers least squares") {
    DesignMatrix d = gen_gaussian(30, 6, 23);
    Rng rng(24);
    Vector y(30);
    for (auto& v : y) v = rng.normal();
    IndexSet full{0, 1, 2, 3, 4, 5};
    Vector ls = least_squares(d.X, y, full);
    LassoOptions opts;
    opts.t_budget = norm1(ls) * 2.0;
    opts.tol = 1e-14;
    Estimate est = solve_lasso_constrained(d, y, opts);
    REQUIRE(est.status == "ok");
    CHECK(testutil::max_abs_diff(est.beta, ls) <= 1e-6);
}

TEST_CASE("the two forms meet at the exchanged budget") {
    DesignMatrix d = gen_gaussian(30, 10, 29);
    SparseTruth t = gen_sparse_truth(10, 3, AmplitudeRule::gaussian_unit, 1.0, 30);
    Vector y = noisy_sparse_response(d, t, 0.3, 31);

    LassoOptions pen;
    pen.lambda = 0.1 * norm_inf(serial::mat_transpose_vec(d.X, y));
    Estimate a = solve_lasso_penalized(d, y, pen);
    REQUIRE(a.status == "ok");
    const double fit_a = a.objective - *pen.lambda * norm1(a.beta);

    LassoOptions con;
    con.t_budget = norm1(a.beta);
    Estimate b = solve_lasso_constrained(d, y, con);
    REQUIRE(b.status == "ok");

    CHECK(std::fabs(fit_a - b.objective) <= 1e-5 * (1.0 + std::fabs(fit_a)));
}

TEST_CASE("option validation demands exactly one form") {
    DesignMatrix d = design_from_matrix(Matrix::identity(2));
    Vector y{1.0, 2.0};
    LassoOptions none;
    CHECK_THROWS(solve_lasso_penalized(d, y, none));
    CHECK_THROWS(solve_lasso_constrained(d, y, none));
    LassoOptions both;
    both.lambda = 1.0;
    both.t_budget = 1.0;
    CHECK_THROWS(solve_lasso_penalized(d, y, both));
    CHECK_THROWS(solve_lasso_constrained(d, y, both));
    LassoOptions neg;
    neg.lambda = -0.5;
    CHECK_THROWS(solve_lasso_penalized(d, y, neg));
    LassoOptions negt;
    negt.t_budget = -0.5;
    CHECK_THROWS(solve_lasso_constrained(d, y, negt));
    LassoOptions plain;
    plain.lambda = 1.0;
    CHECK_THROWS(solve_lasso_penalized(d, Vector{1.0}, plain));
}

TEST_CASE("starved iteration budgets are flagged") {
    DesignMatrix d = gen_gaussian(25, 40, 37);
    SparseTruth t = gen_sparse_truth(40, 6, AmplitudeRule::gaussian_unit, 1.0, 38);
    Vector y = noisy_sparse_response(d, t, 0.5, 39);
    LassoOptions opts;
    opts.lambda = 0.05;
    opts.max_iters = 1;
    CHECK(solve_lasso_penalized(d, y, opts).status == "max_iters");
    LassoOptions copts;
    copts.t_budget = 3.0;
    copts.max_iters = 1;
    CHECK(solve_lasso_constrained(d, y, copts).status == "max_iters");
}
