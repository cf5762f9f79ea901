#include "ds/linalg.hpp"

#include "ds/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace ds {

Vector CholeskyFactor::solve(const Vector& b) const {
    Vector x = b;
    solve_in_place(x);
    return x;
}

void CholeskyFactor::solve_in_place(Vector& b) const {
    const std::size_t n = L.rows;
    if (b.size() != n) throw DimensionError("CholeskyFactor::solve: length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        const double* li = L.row(i);
        for (std::size_t j = 0; j < i; ++j) s -= li[j] * b[j];
        b[i] = s / li[i];
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= L(j, ii) * b[j];
        b[ii] = s / L(ii, ii);
    }
}

CholeskyFactor cholesky(const Matrix& A) {
    if (A.rows != A.cols) throw DimensionError("cholesky: matrix not square");
    const std::size_t n = A.rows;
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, A(i, i));
    const double pivot_floor = 1e-12 * max_diag;

    Matrix L(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = A(j, j);
        const double* lj = L.row(j);
        for (std::size_t k = 0; k < j; ++k) d -= lj[k] * lj[k];
        if (d <= pivot_floor || !std::isfinite(d)) throw NotPositiveDefiniteError(j);
        const double ljj = std::sqrt(d);
        L(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = A(i, j);
            const double* li = L.row(i);
            for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
            L(i, j) = s / ljj;
        }
    }
    return {std::move(L)};
}

Vector solve_spd(const Matrix& A, const Vector& b) {
    if (A.rows != A.cols) throw DimensionError("solve_spd: matrix not square");
    if (b.size() != A.rows) throw DimensionError("solve_spd: rhs length mismatch");
    CholeskyFactor F = cholesky(A);
    Vector x = F.solve(b);
    // One refinement step tightens the residual to near machine level.
    Vector r = b;
    Vector Ax = mat_vec(A, x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= Ax[i];
    F.solve_in_place(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += r[i];
    return x;
}

Vector least_squares(const Matrix& X, const Vector& y, const IndexSet& support) {
    if (y.size() != X.rows) throw DimensionError("least_squares: y length != rows");
    for (std::size_t k = 0; k < support.size(); ++k) {
        if (support[k] >= X.cols)
            throw std::invalid_argument("least_squares: support index out of range");
        if (k > 0 && support[k] <= support[k - 1])
            throw std::invalid_argument("least_squares: support not strictly ascending");
    }
    Vector beta(X.cols, 0.0);
    const std::size_t s = support.size();
    if (s == 0) return beta;

    // Normal equations on the selected columns.
    Matrix G(s, s);
    Vector rhs(s, 0.0);
    for (std::size_t a = 0; a < s; ++a) {
        for (std::size_t b = a; b < s; ++b) {
            double acc = 0.0;
            for (std::size_t i = 0; i < X.rows; ++i)
                acc += X(i, support[a]) * X(i, support[b]);
            G(a, b) = acc;
            G(b, a) = acc;
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) acc += X(i, support[a]) * y[i];
        rhs[a] = acc;
    }

    CholeskyFactor F;
    try {
        F = cholesky(G);
    } catch (const NotPositiveDefiniteError&) {
        throw SingularSubsetError(s);
    }
    Vector coef = F.solve(rhs);
    // One refinement step at the normal-equation level.
    Vector resid = rhs;
    Vector Gc = mat_vec(G, coef);
    for (std::size_t a = 0; a < s; ++a) resid[a] -= Gc[a];
    F.solve_in_place(resid);
    for (std::size_t a = 0; a < s; ++a) coef[a] += resid[a];

    for (std::size_t a = 0; a < s; ++a) beta[support[a]] = coef[a];
    return beta;
}

}  // namespace ds
