#include "abskkt/dense.hpp"

#include "abskkt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace abskkt {

namespace {

void require_same(const char* what, std::size_t expected, std::size_t actual) {
    if (expected != actual) {
        throw DimensionError(what, expected, actual);
    }
}

} // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require_same("Matrix literal row length", cols_, r.size());
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Vector Matrix::row_vector(std::size_t i) const {
    auto r = row(i);
    return Vector(std::vector<double>(r.begin(), r.end()));
}

Vector Matrix::col_vector(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        v[i] = (*this)(i, j);
    }
    return v;
}

// ---------------------------------------------------------------------------

Permutation::Permutation(std::size_t n) : forward_(n) {
    std::iota(forward_.begin(), forward_.end(), std::size_t{0});
}

Permutation::Permutation(std::vector<std::size_t> forward) : forward_(std::move(forward)) {
    std::vector<bool> seen(forward_.size(), false);
    for (std::size_t idx : forward_) {
        if (idx >= forward_.size() || seen[idx]) {
            throw DimensionError("Permutation entry out of range or repeated", forward_.size(), idx);
        }
        seen[idx] = true;
    }
}

void Permutation::swap(std::size_t a, std::size_t b) noexcept {
    std::swap(forward_[a], forward_[b]);
}

bool Permutation::is_identity() const noexcept {
    for (std::size_t j = 0; j < forward_.size(); ++j) {
        if (forward_[j] != j) {
            return false;
        }
    }
    return true;
}

Permutation Permutation::inverse() const {
    std::vector<std::size_t> inv(forward_.size());
    for (std::size_t j = 0; j < forward_.size(); ++j) {
        inv[forward_[j]] = j;
    }
    return Permutation(std::move(inv));
}

Vector Permutation::gather(const Vector& v) const {
    require_same("Permutation::gather length", size(), v.size());
    Vector out(v.size());
    for (std::size_t j = 0; j < size(); ++j) {
        out[j] = v[forward_[j]];
    }
    return out;
}

Vector Permutation::scatter(const Vector& v) const {
    require_same("Permutation::scatter length", size(), v.size());
    Vector out(v.size());
    for (std::size_t j = 0; j < size(); ++j) {
        out[forward_[j]] = v[j];
    }
    return out;
}

Matrix Permutation::gather_columns(const Matrix& m) const {
    require_same("Permutation::gather_columns width", size(), m.cols());
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < size(); ++j) {
            out(i, j) = m(i, forward_[j]);
        }
    }
    return out;
}

Matrix Permutation::scatter_columns(const Matrix& m) const {
    require_same("Permutation::scatter_columns width", size(), m.cols());
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < size(); ++j) {
            out(i, forward_[j]) = m(i, j);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

Vector mat_vec(const Matrix& a, const Vector& x) {
    require_same("mat_vec: A.cols vs x.len", a.cols(), x.size());
    Vector y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        y[i] = dot(a.row(i), x.span());
    }
    return y;
}

Vector mat_tvec(const Matrix& a, const Vector& v) {
    require_same("mat_tvec: A.rows vs v.len", a.rows(), v.size());
    // Column-oriented sweep keeps the summation order over i identical to
    // dot(column j, v), which is what mat_vec(transpose(A), v) would do.
    Vector y(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double vi = v[i];
        auto r = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            y[j] += r[j] * vi;
        }
    }
    return y;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
    require_same("mat_mul: A.cols vs B.rows", a.cols(), b.rows());
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) {
                continue;
            }
            auto bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                ci[j] += aik * bk[j];
            }
        }
    }
    return c;
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            t(j, i) = a(i, j);
        }
    }
    return t;
}

void rank1_update_in_place(Matrix& h, const Vector& u, const Vector& w, double scale) {
    require_same("rank1_update: H.rows vs u.len", h.rows(), u.size());
    require_same("rank1_update: H.cols vs w.len", h.cols(), w.size());
    if (!std::isfinite(scale)) {
        throw Error("rank1_update: non-finite scale");
    }
    if (scale == 0.0) {
        return;
    }
    for (std::size_t i = 0; i < h.rows(); ++i) {
        const double ui = u[i];
        if (ui == 0.0) {
            continue;
        }
        auto hi = h.row(i);
        for (std::size_t j = 0; j < h.cols(); ++j) {
            hi[j] -= scale * (ui * w[j]);
        }
    }
}

Matrix rank1_update(const Matrix& h, const Vector& u, const Vector& w, double scale) {
    Matrix out = h;
    rank1_update_in_place(out, u, w, scale);
    return out;
}

Vector tri_solve(const Matrix& l, const Vector& rhs, TriangleShape shape, bool transposed,
                 bool unit_diagonal, double pivot_min) {
    require_same("tri_solve: triangle must be square", l.rows(), l.cols());
    require_same("tri_solve: rhs length", l.rows(), rhs.size());
    const std::size_t n = l.rows();
    // Effective matrix T (possibly the transpose of the stored triangle).
    auto t = [&](std::size_t i, std::size_t j) { return transposed ? l(j, i) : l(i, j); };
    const bool forward = (shape == TriangleShape::lower) != transposed;

    Vector x = rhs;
    for (std::size_t step = 0; step < n; ++step) {
        const std::size_t i = forward ? step : n - 1 - step;
        double acc = x[i];
        if (forward) {
            for (std::size_t j = 0; j < i; ++j) {
                acc -= t(i, j) * x[j];
            }
        } else {
            for (std::size_t j = i + 1; j < n; ++j) {
                acc -= t(i, j) * x[j];
            }
        }
        if (unit_diagonal) {
            x[i] = acc;
        } else {
            const double d = t(i, i);
            if (!(std::abs(d) > pivot_min)) {
                throw SingularError("tri_solve: singular triangular pivot", i);
            }
            x[i] = acc / d;
        }
    }
    return x;
}

double dot(std::span<const double> u, std::span<const double> v) {
    require_same("dot: lengths", u.size(), v.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        acc += u[i] * v[i];
    }
    return acc;
}

double dot(const Vector& u, const Vector& v) {
    return dot(u.span(), v.span());
}

double norm_inf(std::span<const double> v) {
    double m = 0.0;
    for (double e : v) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

double norm_inf(const Vector& v) {
    return norm_inf(v.span());
}

double norm_2(const Vector& v) {
    double scale = norm_inf(v);
    if (scale == 0.0) {
        return 0.0;
    }
    double acc = 0.0;
    for (double e : v) {
        const double s = e / scale;
        acc += s * s;
    }
    return scale * std::sqrt(acc);
}

double norm_inf(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (double e : a.row(i)) {
            s += std::abs(e);
        }
        m = std::max(m, s);
    }
    return m;
}

double max_abs(const Matrix& a) {
    return norm_inf(std::span<const double>(a.data(), a.rows() * a.cols()));
}

Vector operator+(const Vector& a, const Vector& b) {
    require_same("vector +", a.size(), b.size());
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] + b[i];
    }
    return out;
}

Vector operator-(const Vector& a, const Vector& b) {
    require_same("vector -", a.size(), b.size());
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

Vector operator*(double s, const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out[i] = s * v[i];
    }
    return out;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix out = a;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (double& e : out.row(i)) {
            e *= s;
        }
    }
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same("matrix - rows", a.rows(), b.rows());
    require_same("matrix - cols", a.cols(), b.cols());
    Matrix out(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out(i, j) = a(i, j) - b(i, j);
        }
    }
    return out;
}

Vector concat(const Vector& a, const Vector& b) {
    std::vector<double> v(a.begin(), a.end());
    v.insert(v.end(), b.begin(), b.end());
    return Vector(std::move(v));
}

} // namespace abskkt
