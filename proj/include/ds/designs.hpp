#pragma once

#include "ds/linalg.hpp"
#include "ds/matrix.hpp"

#include <cstdint>
#include <string>

namespace ds {

enum class DesignKind { gaussian, bernoulli, partial_fourier, identity_fourier, file };

std::string to_string(DesignKind k);
DesignKind design_kind_from_string(const std::string& s);

// A design together with its column norms. column_norms holds the norms the
// columns had before the most recent normalize_columns call (for fresh
// designs, the actual norms), which is what the per-column penalty rule needs.
struct DesignMatrix {
    Matrix X;
    Vector column_norms;
    DesignKind kind = DesignKind::file;
    std::uint64_t seed = 0;
};

enum class AmplitudeRule { gaussian_unit, signed_constant };

std::string to_string(AmplitudeRule r);
AmplitudeRule amplitude_rule_from_string(const std::string& s);

struct SparseTruth {
    Vector beta;
    IndexSet support;  // ascending
    std::size_t sparsity = 0;
    AmplitudeRule amplitude_rule = AmplitudeRule::gaussian_unit;
    double amplitude = 1.0;
};

// Entries i.i.d. normal with variance 1/n, so columns have norm near 1.
DesignMatrix gen_gaussian(std::size_t n, std::size_t p, std::uint64_t seed);

// Entries +-1/sqrt(n); every column norm is exactly 1.
DesignMatrix gen_bernoulli(std::size_t n, std::size_t p, std::uint64_t seed);

// n distinct sample times drawn from {0, ..., p-1}; columns are the real
// trigonometric dictionary on those times (constant, cosine/sine pairs, and
// the top cosine when p is even), each unit-normalized. Requires n <= p.
DesignMatrix gen_partial_fourier(std::size_t n, std::size_t p, std::uint64_t seed);

// The n x 2n concatenation [I | T] of the identity with the full trig
// dictionary on n points; all columns unit-normalized. Requires n >= 4.
DesignMatrix gen_identity_fourier(std::size_t n);

DesignMatrix design_from_matrix(Matrix X);

// Support drawn uniformly without replacement; amplitudes from the rule
// (gaussian_unit redraws values below 1e-6 in magnitude).
SparseTruth gen_sparse_truth(std::size_t p, std::size_t sparsity, AmplitudeRule rule,
                             double amplitude, std::uint64_t seed);

// Divides each column by its norm; column_norms afterwards holds the
// pre-division norms. A zero column raises an error naming its index.
DesignMatrix normalize_columns(const DesignMatrix& d);

}  // namespace ds
