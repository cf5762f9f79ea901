#include "ds/kernels.hpp"

#include <cstdint>

namespace ds {

namespace {

using idx = std::int64_t;

void check_mat_vec(const Matrix& X, const Vector& v, std::size_t expect) {
    if (v.size() != expect)
        throw DimensionError("mat_vec: matrix is " + std::to_string(X.rows) + "x" +
                             std::to_string(X.cols) + ", vector has length " +
                             std::to_string(v.size()));
}

}  // namespace

Vector mat_vec(const Matrix& X, const Vector& v) {
    check_mat_vec(X, v, X.cols);
    Vector out(X.rows, 0.0);
    const idx n = static_cast<idx>(X.rows), p = static_cast<idx>(X.cols);
#pragma omp parallel for schedule(static) if (n * p > 16384)
    for (idx i = 0; i < n; ++i) {
        const double* xi = X.row(static_cast<std::size_t>(i));
        double s = 0.0;
        for (idx j = 0; j < p; ++j) s += xi[j] * v[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i)] = s;
    }
    return out;
}

Vector mat_transpose_vec(const Matrix& X, const Vector& v) {
    check_mat_vec(X, v, X.rows);
    Vector out(X.cols, 0.0);
    const idx n = static_cast<idx>(X.rows), p = static_cast<idx>(X.cols);
#pragma omp parallel for schedule(static) if (n * p > 16384)
    for (idx j = 0; j < p; ++j) {
        double s = 0.0;
        for (idx i = 0; i < n; ++i)
            s += X.a[static_cast<std::size_t>(i) * X.cols + static_cast<std::size_t>(j)] *
                 v[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(j)] = s;
    }
    return out;
}

Matrix transpose(const Matrix& X) {
    Matrix T(X.cols, X.rows);
    for (std::size_t i = 0; i < X.rows; ++i)
        for (std::size_t j = 0; j < X.cols; ++j) T(j, i) = X(i, j);
    return T;
}

Matrix gram(const Matrix& X) {
    const std::size_t p = X.cols;
    Matrix XT = transpose(X);
    Matrix G(p, p);
    const idx pp = static_cast<idx>(p), n = static_cast<idx>(X.rows);
#pragma omp parallel for schedule(dynamic, 8) if (pp * pp * n > 32768)
    for (idx i = 0; i < pp; ++i) {
        const double* ci = XT.row(static_cast<std::size_t>(i));
        for (idx j = i; j < pp; ++j) {
            const double* cj = XT.row(static_cast<std::size_t>(j));
            double s = 0.0;
            for (idx k = 0; k < n; ++k) s += ci[k] * cj[k];
            G(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = s;
            G(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) = s;
        }
    }
    return G;
}

Matrix row_outer(const Matrix& X, const Vector& w) {
    if (w.size() != X.cols) throw DimensionError("row_outer: weight length != cols");
    const idx n = static_cast<idx>(X.rows), p = static_cast<idx>(X.cols);
    Matrix B(X.rows, X.rows);
#pragma omp parallel for schedule(dynamic, 4) if (n * n * p > 32768)
    for (idx r = 0; r < n; ++r) {
        const double* xr = X.row(static_cast<std::size_t>(r));
        for (idx s = r; s < n; ++s) {
            const double* xs = X.row(static_cast<std::size_t>(s));
            double acc = 0.0;
            for (idx k = 0; k < p; ++k) acc += w[static_cast<std::size_t>(k)] * xr[k] * xs[k];
            B(static_cast<std::size_t>(r), static_cast<std::size_t>(s)) = acc;
            B(static_cast<std::size_t>(s), static_cast<std::size_t>(r)) = acc;
        }
    }
    return B;
}

Matrix mat_mul(const Matrix& A, const Matrix& B) {
    if (A.cols != B.rows) throw DimensionError("mat_mul: inner dimensions differ");
    Matrix C(A.rows, B.cols);
    const idx m = static_cast<idx>(A.rows), r = static_cast<idx>(A.cols),
              c = static_cast<idx>(B.cols);
#pragma omp parallel for schedule(static) if (m * r * c > 32768)
    for (idx i = 0; i < m; ++i) {
        double* ci = C.row(static_cast<std::size_t>(i));
        const double* ai = A.row(static_cast<std::size_t>(i));
        for (idx k = 0; k < r; ++k) {
            const double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = B.row(static_cast<std::size_t>(k));
            for (idx j = 0; j < c; ++j) ci[j] += aik * bk[j];
        }
    }
    return C;
}

Matrix mat_mul_transA(const Matrix& A, const Matrix& B) {
    if (A.rows != B.rows) throw DimensionError("mat_mul_transA: row counts differ");
    Matrix C(A.cols, B.cols);
    const idx m = static_cast<idx>(A.rows), r = static_cast<idx>(A.cols),
              c = static_cast<idx>(B.cols);
#pragma omp parallel for schedule(static) if (m * r * c > 32768)
    for (idx i = 0; i < r; ++i) {
        double* ci = C.row(static_cast<std::size_t>(i));
        for (idx k = 0; k < m; ++k) {
            const double aki = A.a[static_cast<std::size_t>(k) * A.cols + static_cast<std::size_t>(i)];
            if (aki == 0.0) continue;
            const double* bk = B.row(static_cast<std::size_t>(k));
            for (idx j = 0; j < c; ++j) ci[j] += aki * bk[j];
        }
    }
    return C;
}

Matrix scale_cols(const Matrix& M, const Vector& s) {
    if (s.size() != M.cols) throw DimensionError("scale_cols: length mismatch");
    Matrix R = M;
    for (std::size_t i = 0; i < M.rows; ++i)
        for (std::size_t j = 0; j < M.cols; ++j) R(i, j) *= s[j];
    return R;
}

Matrix scale_rows(const Matrix& M, const Vector& s) {
    if (s.size() != M.rows) throw DimensionError("scale_rows: length mismatch");
    Matrix R = M;
    for (std::size_t i = 0; i < M.rows; ++i) {
        double* ri = R.row(i);
        for (std::size_t j = 0; j < M.cols; ++j) ri[j] *= s[i];
    }
    return R;
}

namespace serial {

Vector mat_vec(const Matrix& X, const Vector& v) {
    check_mat_vec(X, v, X.cols);
    Vector out(X.rows, 0.0);
    for (std::size_t i = 0; i < X.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < X.cols; ++j) s += X(i, j) * v[j];
        out[i] = s;
    }
    return out;
}

Vector mat_transpose_vec(const Matrix& X, const Vector& v) {
    check_mat_vec(X, v, X.rows);
    Vector out(X.cols, 0.0);
    for (std::size_t j = 0; j < X.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < X.rows; ++i) s += X(i, j) * v[i];
        out[j] = s;
    }
    return out;
}

Matrix gram(const Matrix& X) {
    Matrix XT = transpose(X);
    Matrix G(X.cols, X.cols);
    for (std::size_t i = 0; i < X.cols; ++i)
        for (std::size_t j = i; j < X.cols; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < X.rows; ++k) s += XT(i, k) * XT(j, k);
            G(i, j) = s;
            G(j, i) = s;
        }
    return G;
}

Matrix row_outer(const Matrix& X, const Vector& w) {
    if (w.size() != X.cols) throw DimensionError("row_outer: weight length != cols");
    Matrix B(X.rows, X.rows);
    for (std::size_t r = 0; r < X.rows; ++r)
        for (std::size_t s = r; s < X.rows; ++s) {
            double acc = 0.0;
            for (std::size_t k = 0; k < X.cols; ++k) acc += w[k] * X(r, k) * X(s, k);
            B(r, s) = acc;
            B(s, r) = acc;
        }
    return B;
}

Matrix mat_mul(const Matrix& A, const Matrix& B) {
    if (A.cols != B.rows) throw DimensionError("mat_mul: inner dimensions differ");
    Matrix C(A.rows, B.cols);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t k = 0; k < A.cols; ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

}  // namespace serial

}  // namespace ds
