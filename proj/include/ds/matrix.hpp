#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ds {

using Vector = std::vector<double>;

// Dense real matrix, row-major.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), a(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    double* row(std::size_t i) { return a.data() + i * cols; }
    const double* row(std::size_t i) const { return a.data() + i * cols; }

    static Matrix identity(std::size_t n);
};

class DimensionError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

double dot(const Vector& x, const Vector& y);
double norm2(const Vector& v);
double norm1(const Vector& v);
double norm_inf(const Vector& v);

// Shortest round-trip decimal text for a double, locale-independent.
std::string format_double(double v);
double parse_double(std::string_view s);

// Matrix text format: first line "<rows> <cols>", then one line per row with
// cols space-separated decimals.
std::string to_text(const Matrix& m);
Matrix matrix_from_text(const std::string& text);
void save_matrix(const Matrix& m, const std::string& path);
Matrix load_matrix(const std::string& path);

// Vector text: one decimal per line.
void save_vector(const Vector& v, const std::string& path);
Vector load_vector(const std::string& path);

}  // namespace ds
