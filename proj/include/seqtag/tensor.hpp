#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace seqtag {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles. All model parameters live in these.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double* row(std::size_t r) { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const { return data_.data() + r * cols_; }

    Vector col(std::size_t c) const;
    void set_col(std::size_t c, const Vector& v);
    void add_to_col(std::size_t c, const Vector& v);

    void fill(double v) { data_.assign(data_.size(), v); }

    bool operator==(const Matrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// m (r x c) times v (c) -> (r). Throws on shape mismatch.
Vector matvec(const Matrix& m, const Vector& v);
// m^T (c x r) times v (r) -> (c). Used by every backward pass.
Vector matvec_t(const Matrix& m, const Vector& v);
// acc += a b^T where acc is (len(a) x len(b)).
void add_outer(Matrix& acc, const Vector& a, const Vector& b);

double log_sum_exp(const double* v, std::size_t n);
double log_sum_exp(const Vector& v);

enum class ElemOp { Add, Mul };
Vector elementwise(const Vector& a, const Vector& b, ElemOp op);

Vector vadd(const Vector& a, const Vector& b);
Vector vmul(const Vector& a, const Vector& b);
void vadd_inplace(Vector& a, const Vector& b);
void vscale_inplace(Vector& a, double s);
Vector concat(const Vector& a, const Vector& b);
double dot(const Vector& a, const Vector& b);

double sigmoid(double x);
Vector vsigmoid(const Vector& v);
Vector vtanh(const Vector& v);

// Splittable counter-based generator (SplitMix64). One instance per owner;
// identical seed gives an identical draw sequence on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), state_(seed) {}

    std::uint64_t next_u64();
    // Draw in [0, 1) with 53 bits of mantissa.
    double next_double();
    double uniform(double lo, double hi);
    Vector uniform_vec(std::size_t n, double lo, double hi);
    // Index in [0, n).
    std::size_t next_index(std::size_t n);
    // Independent child stream; advancing one never affects the other.
    Rng split() { return Rng(next_u64()); }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::uint64_t state_;
};

Vector rng_uniform(Rng& rng, double lo, double hi, std::size_t n);
Matrix random_matrix(std::size_t rows, std::size_t cols, double lo, double hi, Rng& rng);
// Uniform(-r, r) with r = sqrt(6 / (fan_in + fan_out)); fan_in = cols, fan_out = rows.
Matrix scaled_uniform_matrix(std::size_t rows, std::size_t cols, Rng& rng);

[[noreturn]] void shape_error(const std::string& what);

// Named view over one parameter tensor; optimizer, checkpoint and the
// gradient checker all enumerate models through these.
struct TensorRef {
    std::string name;
    double* data = nullptr;
    std::size_t size = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

inline TensorRef ref_of(const std::string& name, Matrix& m) {
    return {name, m.data(), m.size(), m.rows(), m.cols()};
}
inline TensorRef ref_of(const std::string& name, Vector& v) {
    return {name, v.data(), v.size(), v.size(), 1};
}

} // namespace seqtag
