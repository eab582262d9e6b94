#pragma once

// Dense double-precision kernels shared by every solver in the library.
//
// Matrices are stored row-major and indexed from zero: element (i, j) lives
// at data()[i * cols() + j]. All reductions (dot products, mat-vec rows)
// accumulate left to right in index order, so results are reproducible bit
// for bit for a given input.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace abskkt {

class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n, double value = 0.0) : data_(n, value) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    std::span<double> span() noexcept { return data_; }
    std::span<const double> span() const noexcept { return data_; }

    auto begin() noexcept { return data_.begin(); }
    auto end() noexcept { return data_.end(); }
    auto begin() const noexcept { return data_.begin(); }
    auto end() const noexcept { return data_.end(); }

    const std::vector<double>& values() const noexcept { return data_; }

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> data_;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}
    /// Row-by-row literal, e.g. Matrix{{1, 2}, {3, 4}}. Ragged input throws DimensionError.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    Vector row_vector(std::size_t i) const;
    Vector col_vector(std::size_t j) const;

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Bijection on {0, ..., size-1}. `at(j)` is the original index placed at position j.
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::size_t n);
    /// Throws DimensionError if `forward` is not a bijection.
    explicit Permutation(std::vector<std::size_t> forward);

    std::size_t size() const noexcept { return forward_.size(); }
    std::size_t at(std::size_t j) const noexcept { return forward_[j]; }
    const std::vector<std::size_t>& forward() const noexcept { return forward_; }

    void swap(std::size_t a, std::size_t b) noexcept;
    bool is_identity() const noexcept;
    Permutation inverse() const;

    /// result[j] = v[at(j)]
    Vector gather(const Vector& v) const;
    /// result[at(j)] = v[j]; inverse of gather.
    Vector scatter(const Vector& v) const;
    /// Column j of the result is column at(j) of m.
    Matrix gather_columns(const Matrix& m) const;
    Matrix scatter_columns(const Matrix& m) const;

    bool operator==(const Permutation&) const = default;

private:
    std::vector<std::size_t> forward_;
};

enum class TriangleShape { lower, upper };

Vector mat_vec(const Matrix& a, const Vector& x);
/// A^T v without forming the transpose.
Vector mat_tvec(const Matrix& a, const Vector& v);
Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Returns h - scale * u w^T. Each entry is formed as h(i,j) - scale * (u[i] * w[j]),
/// so a symmetric h with u == w stays exactly symmetric.
Matrix rank1_update(const Matrix& h, const Vector& u, const Vector& w, double scale);
void rank1_update_in_place(Matrix& h, const Vector& u, const Vector& w, double scale);

/// Forward/back substitution. With `transposed` the system solved is T^T x = rhs,
/// where T is the `shape` triangle of l. Pivots with |t_ii| <= pivot_min throw SingularError.
Vector tri_solve(const Matrix& l, const Vector& rhs, TriangleShape shape, bool transposed = false,
                 bool unit_diagonal = false, double pivot_min = 0.0);

double dot(const Vector& u, const Vector& v);
double dot(std::span<const double> u, std::span<const double> v);
double norm_inf(const Vector& v);
double norm_inf(std::span<const double> v);
double norm_2(const Vector& v);
/// Max absolute row sum.
double norm_inf(const Matrix& a);
double max_abs(const Matrix& a);

Vector operator+(const Vector& a, const Vector& b);
Vector operator-(const Vector& a, const Vector& b);
Vector operator*(double s, const Vector& v);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

/// Stacks two vectors end to end.
Vector concat(const Vector& a, const Vector& b);

} // namespace abskkt
