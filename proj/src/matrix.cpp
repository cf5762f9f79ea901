#include "ds/matrix.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace ds {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Matrix& m) { return all_finite(m.a); }

double dot(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double norm1(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += std::fabs(x);
    return s;
}

double norm_inf(const Vector& v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::fabs(x));
    return s;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("parse_double: bad number '" + std::string(s) + "'");
    return v;
}

std::string to_text(const Matrix& m) {
    std::string out;
    out.reserve(m.rows * m.cols * 20 + 32);
    out += std::to_string(m.rows);
    out += ' ';
    out += std::to_string(m.cols);
    out += '\n';
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) out += ' ';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

namespace {

// Splits on any whitespace; returns tokens as views into `text`.
std::vector<std::string_view> tokenize(const std::string& text) {
    std::vector<std::string_view> toks;
    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        std::size_t start = i;
        while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) toks.push_back(std::string_view(text).substr(start, i - start));
    }
    return toks;
}

std::size_t parse_size(std::string_view s) {
    std::size_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::runtime_error("matrix text: bad dimension '" + std::string(s) + "'");
    return v;
}

}  // namespace

Matrix matrix_from_text(const std::string& text) {
    auto toks = tokenize(text);
    if (toks.size() < 2) throw std::runtime_error("matrix text: missing dimension header");
    std::size_t r = parse_size(toks[0]);
    std::size_t c = parse_size(toks[1]);
    if (toks.size() != 2 + r * c)
        throw std::runtime_error("matrix text: expected " + std::to_string(r * c) +
                                 " entries, found " + std::to_string(toks.size() - 2));
    Matrix m(r, c);
    for (std::size_t k = 0; k < r * c; ++k) m.a[k] = parse_double(toks[2 + k]);
    if (!all_finite(m)) throw std::runtime_error("matrix text: non-finite entry");
    return m;
}

void save_matrix(const Matrix& m, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << to_text(m);
    if (!f) throw std::runtime_error("write failed: " + path);
}

Matrix load_matrix(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return matrix_from_text(ss.str());
}

void save_vector(const Vector& v, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    for (double x : v) f << format_double(x) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

Vector load_vector(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    std::string text = ss.str();
    Vector v;
    for (auto tok : tokenize(text)) v.push_back(parse_double(tok));
    if (!all_finite(v)) throw std::runtime_error("vector text: non-finite entry");
    return v;
}

}  // namespace ds
