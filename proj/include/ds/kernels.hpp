#pragma once

#include "ds/matrix.hpp"

namespace ds {

// Dense kernels, OpenMP-parallel. Every output element is accumulated
// serially in a fixed index order, so results are bit-identical for any
// thread count. ds::serial holds plain-loop reference implementations with
// the same contracts, kept for testing and benchmarking.

Vector mat_vec(const Matrix& X, const Vector& v);            // X v
Vector mat_transpose_vec(const Matrix& X, const Vector& v);  // X' v
Matrix transpose(const Matrix& X);
Matrix gram(const Matrix& X);                                // X' X
Matrix row_outer(const Matrix& X, const Vector& w);          // X diag(w) X'
Matrix mat_mul(const Matrix& A, const Matrix& B);            // A B
Matrix mat_mul_transA(const Matrix& A, const Matrix& B);     // A' B
Matrix scale_cols(const Matrix& M, const Vector& s);         // M diag(s)
Matrix scale_rows(const Matrix& M, const Vector& s);         // diag(s) M

namespace serial {

Vector mat_vec(const Matrix& X, const Vector& v);
Vector mat_transpose_vec(const Matrix& X, const Vector& v);
Matrix gram(const Matrix& X);
Matrix row_outer(const Matrix& X, const Vector& w);
Matrix mat_mul(const Matrix& A, const Matrix& B);

}  // namespace serial

}  // namespace ds
