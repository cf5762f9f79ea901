// Timing comparison of the OpenMP kernels against their serial references.
// Prints one line per (kernel, size) with both times, the speedup, and the
// largest elementwise difference, which must be exactly zero.

#include "ds/kernels.hpp"
#include "ds/rng.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace ds;

namespace {

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(rows, cols);
    for (auto& v : m.a) v = rng.normal();
    return m;
}

Vector random_vector(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Vector v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

double max_diff(const Vector& a, const Vector& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::fabs(a[i] - b[i]));
    return worst;
}

void row(const std::string& name, std::size_t n, std::size_t p, double serial_ms,
         double parallel_ms, double diff) {
    std::printf("%-18s %5zu x %-5zu serial %9.3f ms   parallel %9.3f ms   x%5.2f   max diff %g\n",
                name.c_str(), n, p, serial_ms, parallel_ms,
                parallel_ms > 0.0 ? serial_ms / parallel_ms : 0.0, diff);
}

}  // namespace

int main() {
    std::printf("threads available: %d\n", omp_get_max_threads());
    const int reps = 5;
    for (auto [n, p] : {std::pair<std::size_t, std::size_t>{400, 300},
                        {800, 600},
                        {1200, 900}}) {
        const Matrix X = random_matrix(n, p, 11 * n + p);
        const Matrix B = random_matrix(p, n / 2, 13 * n + p);
        const Vector v = random_vector(p, 17 * n + p);
        const Vector u = random_vector(n, 19 * n + p);
        const Vector w = random_vector(p, 23 * n + p);

        Vector a, b;
        double ts = time_ms([&] { a = serial::mat_vec(X, v); }, reps);
        double tp = time_ms([&] { b = mat_vec(X, v); }, reps);
        row("mat_vec", n, p, ts, tp, max_diff(a, b));

        ts = time_ms([&] { a = serial::mat_transpose_vec(X, u); }, reps);
        tp = time_ms([&] { b = mat_transpose_vec(X, u); }, reps);
        row("mat_transpose_vec", n, p, ts, tp, max_diff(a, b));

        Matrix ma, mb;
        ts = time_ms([&] { ma = serial::gram(X); }, reps);
        tp = time_ms([&] { mb = gram(X); }, reps);
        row("gram", n, p, ts, tp, max_diff(ma.a, mb.a));

        ts = time_ms([&] { ma = serial::row_outer(X, w); }, reps);
        tp = time_ms([&] { mb = row_outer(X, w); }, reps);
        row("row_outer", n, p, ts, tp, max_diff(ma.a, mb.a));

        ts = time_ms([&] { ma = serial::mat_mul(X, B); }, reps);
        tp = time_ms([&] { mb = mat_mul(X, B); }, reps);
        row("mat_mul", n, p, ts, tp, max_diff(ma.a, mb.a));
    }
    return 0;
}
