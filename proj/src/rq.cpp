#include "abskkt/error.hpp"
#include "abskkt/reference.hpp"

#include <cmath>

namespace abskkt {

namespace {

// y <- (I - tau v v^T) y on entries 0..pivot.
void reflect(const Reflector& h, std::span<double> y) {
    if (h.tau == 0.0) {
        return;
    }
    double t = 0.0;
    for (std::size_t j = 0; j <= h.pivot; ++j) {
        t += h.v[j] * y[j];
    }
    t *= h.tau;
    for (std::size_t j = 0; j <= h.pivot; ++j) {
        y[j] -= t * h.v[j];
    }
}

// Reflector sending u[0..pivot] to beta * e_pivot.
Reflector make_reflector(std::span<const double> u, std::size_t pivot, ReflectorSign sign) {
    Reflector h{pivot, Vector(pivot + 1), 0.0};
    h.v[pivot] = 1.0;
    double xnorm = 0.0;
    {
        double scale = 0.0;
        for (std::size_t j = 0; j < pivot; ++j) {
            scale = std::max(scale, std::abs(u[j]));
        }
        if (scale > 0.0) {
            double acc = 0.0;
            for (std::size_t j = 0; j < pivot; ++j) {
                const double s = u[j] / scale;
                acc += s * s;
            }
            xnorm = scale * std::sqrt(acc);
        }
    }
    if (xnorm == 0.0) {
        return h;
    }
    const double alpha = u[pivot];
    const double norm = std::hypot(alpha, xnorm);
    const double sgn = alpha >= 0.0 ? 1.0 : -1.0;
    const double beta = sign == ReflectorSign::standard ? -sgn * norm : sgn * norm;
    h.tau = (beta - alpha) / beta;
    const double inv = 1.0 / (alpha - beta);
    for (std::size_t j = 0; j < pivot; ++j) {
        h.v[j] = u[j] * inv;
    }
    return h;
}

} // namespace

Vector RqFactorization::apply_q(const Vector& v) const {
    if (v.size() != n) {
        throw DimensionError("RqFactorization::apply_q length", n, v.size());
    }
    Vector y = v;
    for (const auto& h : reflectors) {
        reflect(h, y.span());
    }
    return y;
}

Vector RqFactorization::apply_qt(const Vector& v) const {
    if (v.size() != n) {
        throw DimensionError("RqFactorization::apply_qt length", n, v.size());
    }
    Vector y = v;
    for (auto it = reflectors.rbegin(); it != reflectors.rend(); ++it) {
        reflect(*it, y.span());
    }
    return y;
}

Matrix RqFactorization::apply_q(const Matrix& mat) const {
    if (mat.rows() != n) {
        throw DimensionError("RqFactorization::apply_q rows", n, mat.rows());
    }
    // Transpose so every column becomes a contiguous row.
    Matrix t = transpose(mat);
    for (std::size_t j = 0; j < t.rows(); ++j) {
        for (const auto& h : reflectors) {
            reflect(h, t.row(j));
        }
    }
    return transpose(t);
}

Matrix RqFactorization::apply_qt_right(const Matrix& mat) const {
    if (mat.cols() != n) {
        throw DimensionError("RqFactorization::apply_qt_right cols", n, mat.cols());
    }
    // (M Q^T)^T = Q M^T: apply Q to every row of M.
    Matrix out = mat;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (const auto& h : reflectors) {
            reflect(h, out.row(i));
        }
    }
    return out;
}

Matrix RqFactorization::q_dense() const {
    return apply_q(Matrix::identity(n));
}

RqFactorization rq_factor(const Matrix& a, ReflectorSign sign) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m > n) {
        throw DimensionError("rq_factor: more rows than columns", n, m);
    }
    Matrix w = a;
    RqFactorization f;
    f.n = n;
    for (std::size_t step = 0; step < m; ++step) {
        const std::size_t i = m - 1 - step;
        const std::size_t pivot = n - m + i;
        Reflector h = make_reflector(w.row(i), pivot, sign);
        // A <- A H from the right, rows 0..i; rows below are already reduced
        // and vanish on entries 0..pivot-1.
        for (std::size_t r = 0; r <= i; ++r) {
            reflect(h, w.row(r));
        }
        for (std::size_t j = 0; j < pivot; ++j) {
            w(i, j) = 0.0;
        }
        f.reflectors.push_back(std::move(h));
    }
    f.r = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            f.r(i, j) = w(i, n - m + j);
        }
    }
    return f;
}

} // namespace abskkt
