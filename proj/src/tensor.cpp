#include "seqtag/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace seqtag {

void shape_error(const std::string& what) {
    throw std::invalid_argument(what);
}

Vector Matrix::col(std::size_t c) const {
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
    return out;
}

void Matrix::set_col(std::size_t c, const Vector& v) {
    if (v.size() != rows_) shape_error("set_col: length " + std::to_string(v.size()) +
                                       " vs rows " + std::to_string(rows_));
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

void Matrix::add_to_col(std::size_t c, const Vector& v) {
    if (v.size() != rows_) shape_error("add_to_col: length mismatch");
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) += v[r];
}

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols() != v.size())
        shape_error("matvec: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    " but vector has length " + std::to_string(v.size()));
    Vector out(m.rows(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

Vector matvec_t(const Matrix& m, const Vector& v) {
    if (m.rows() != v.size())
        shape_error("matvec_t: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                    " but vector has length " + std::to_string(v.size()));
    Vector out(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.row(r);
        const double s = v[r];
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += row[c] * s;
    }
    return out;
}

void add_outer(Matrix& acc, const Vector& a, const Vector& b) {
    if (acc.rows() != a.size() || acc.cols() != b.size())
        shape_error("add_outer: acc is " + std::to_string(acc.rows()) + "x" + std::to_string(acc.cols()) +
                    " but vectors have lengths " + std::to_string(a.size()) + ", " + std::to_string(b.size()));
    for (std::size_t r = 0; r < a.size(); ++r) {
        double* row = acc.row(r);
        const double s = a[r];
        for (std::size_t c = 0; c < b.size(); ++c) row[c] += s * b[c];
    }
}

double log_sum_exp(const double* v, std::size_t n) {
    if (n == 0) throw std::invalid_argument("log_sum_exp: empty input");
    double m = v[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, v[i]);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::exp(v[i] - m);
    return m + std::log(acc);
}

double log_sum_exp(const Vector& v) { return log_sum_exp(v.data(), v.size()); }

Vector elementwise(const Vector& a, const Vector& b, ElemOp op) {
    if (a.size() != b.size())
        shape_error("elementwise: lengths " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = op == ElemOp::Add ? a[i] + b[i] : a[i] * b[i];
    return out;
}

Vector vadd(const Vector& a, const Vector& b) { return elementwise(a, b, ElemOp::Add); }
Vector vmul(const Vector& a, const Vector& b) { return elementwise(a, b, ElemOp::Mul); }

void vadd_inplace(Vector& a, const Vector& b) {
    if (a.size() != b.size()) shape_error("vadd_inplace: length mismatch");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

void vscale_inplace(Vector& a, double s) {
    for (double& x : a) x *= s;
}

Vector concat(const Vector& a, const Vector& b) {
    Vector out;
    out.reserve(a.size() + b.size());
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) shape_error("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double sigmoid(double x) {
    // Split on sign so exp never overflows; clamp away exact zero so the
    // result stays strictly positive even for arguments like -1000.
    double s;
    if (x >= 0.0) {
        const double e = std::exp(-x);
        s = 1.0 / (1.0 + e);
    } else {
        const double e = std::exp(x);
        s = e / (1.0 + e);
    }
    if (s <= 0.0) s = std::numeric_limits<double>::min();
    return s;
}

Vector vsigmoid(const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = sigmoid(v[i]);
    return out;
}

Vector vtanh(const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
    return out;
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double Rng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    if (!(lo < hi))
        throw std::invalid_argument("uniform: need lo < hi, got [" + std::to_string(lo) + ", " +
                                    std::to_string(hi) + ")");
    return lo + (hi - lo) * next_double();
}

Vector Rng::uniform_vec(std::size_t n, double lo, double hi) {
    if (!(lo < hi))
        throw std::invalid_argument("uniform_vec: need lo < hi");
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = lo + (hi - lo) * next_double();
    return out;
}

std::size_t Rng::next_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("next_index: empty range");
    return static_cast<std::size_t>(next_double() * static_cast<double>(n)) % n;
}

Vector rng_uniform(Rng& rng, double lo, double hi, std::size_t n) {
    return rng.uniform_vec(n, lo, hi);
}

Matrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng) {
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
    return m;
}

Matrix scaled_uniform_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    const double r = std::sqrt(6.0 / static_cast<double>(rows + cols));
    return random_matrix(rows, cols, -r, r, rng);
}

} // namespace seqtag
