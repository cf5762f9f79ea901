#pragma once

#include "ds/matrix.hpp"

#include <cstddef>
#include <vector>

namespace ds {

using IndexSet = std::vector<std::size_t>;

class NotPositiveDefiniteError : public std::runtime_error {
  public:
    explicit NotPositiveDefiniteError(std::size_t pivot)
        : std::runtime_error("not positive definite: pivot " + std::to_string(pivot)),
          pivot_(pivot) {}
    std::size_t pivot_index() const { return pivot_; }

  private:
    std::size_t pivot_;
};

class SingularSubsetError : public std::runtime_error {
  public:
    explicit SingularSubsetError(std::size_t size)
        : std::runtime_error("singular subset of size " + std::to_string(size)),
          size_(size) {}
    std::size_t subset_size() const { return size_; }

  private:
    std::size_t size_;
};

struct CholeskyFactor {
    Matrix L;  // lower triangular
    Vector solve(const Vector& b) const;
    void solve_in_place(Vector& b) const;
};

// LL' factorization of a symmetric positive definite matrix; only the lower
// triangle of A is read. A pivot <= 1e-12 times the largest diagonal entry
// raises NotPositiveDefiniteError carrying the failing index.
CholeskyFactor cholesky(const Matrix& A);

// Solves A x = b for SPD A via Cholesky plus one iterative-refinement step.
Vector solve_spd(const Matrix& A, const Vector& b);

// Least squares of y on the columns of X listed in `support` (ascending,
// unique); entries off the support are zero. Rank deficiency raises
// SingularSubsetError naming the subset size.
Vector least_squares(const Matrix& X, const Vector& y, const IndexSet& support);

}  // namespace ds
