#include "abskkt/error.hpp"
#include "abskkt/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace abskkt {

namespace {

// Growth-balancing constant of Bunch and Kaufman.
const double kAlpha = (1.0 + std::sqrt(17.0)) / 8.0;

// Symmetric interchange of positions p and q in the trailing matrix, plus the
// already computed part of L.
void symmetric_swap(Matrix& w, Matrix& l, Permutation& perm, std::size_t k, std::size_t p,
                    std::size_t q) {
    if (p == q) {
        return;
    }
    const std::size_t n = w.rows();
    for (std::size_t j = 0; j < n; ++j) {
        std::swap(w(p, j), w(q, j));
    }
    for (std::size_t i = 0; i < n; ++i) {
        std::swap(w(i, p), w(i, q));
    }
    for (std::size_t j = 0; j < k; ++j) {
        std::swap(l(p, j), l(q, j));
    }
    perm.swap(p, q);
}

} // namespace

Matrix LdltFactorization::d_dense() const {
    Matrix d(size(), size());
    for (const auto& blk : blocks) {
        d(blk.start, blk.start) = blk.a;
        if (blk.size == 2) {
            d(blk.start + 1, blk.start) = blk.b;
            d(blk.start, blk.start + 1) = blk.b;
            d(blk.start + 1, blk.start + 1) = blk.c;
        }
    }
    return d;
}

Matrix LdltFactorization::reconstruct() const {
    return mat_mul(mat_mul(l, d_dense()), transpose(l));
}

LdltFactorization ldlt_factor(const Matrix& m, std::optional<double> pivot_min) {
    if (!m.square()) {
        throw DimensionError("ldlt_factor: matrix must be square", m.rows(), m.cols());
    }
    const std::size_t n = m.rows();
    const double tol = pivot_min ? *pivot_min
                                 : static_cast<double>(n) * std::numeric_limits<double>::epsilon() *
                                       norm_inf(m);

    // Work on a full symmetric copy built from the lower triangle.
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            w(i, j) = m(i, j);
            w(j, i) = m(i, j);
        }
    }
    LdltFactorization f{Matrix::identity(n), {}, Permutation(n)};
    Matrix& l = f.l;

    std::size_t k = 0;
    while (k < n) {
        const double absakk = std::abs(w(k, k));
        double colmax = 0.0;
        std::size_t r = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(w(i, k)) > colmax) {
                colmax = std::abs(w(i, k));
                r = i;
            }
        }
        if (std::max(absakk, colmax) == 0.0) {
            throw SingularError("ldlt_factor: zero column", k);
        }

        std::size_t block = 1;
        std::size_t kp = k;
        if (absakk < kAlpha * colmax) {
            double rowmax = 0.0;
            for (std::size_t j = k; j < n; ++j) {
                if (j != r) {
                    rowmax = std::max(rowmax, std::abs(w(r, j)));
                }
            }
            if (absakk * rowmax >= kAlpha * colmax * colmax) {
                kp = k;
            } else if (std::abs(w(r, r)) >= kAlpha * rowmax) {
                kp = r;
            } else {
                kp = r;
                block = 2;
            }
        }
        const std::size_t kk = k + block - 1;
        symmetric_swap(w, l, f.perm, k, kk, kp);

        if (block == 1) {
            const double d = w(k, k);
            if (!(std::abs(d) > tol) || d == 0.0) {
                throw SingularError("ldlt_factor: singular 1x1 pivot", k);
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                l(i, k) = w(i, k) / d;
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                const double li = l(i, k);
                if (li == 0.0) {
                    continue;
                }
                for (std::size_t j = k + 1; j <= i; ++j) {
                    w(i, j) -= li * w(j, k);
                }
            }
            for (std::size_t i = k + 1; i < n; ++i) {
                for (std::size_t j = k + 1; j < i; ++j) {
                    w(j, i) = w(i, j);
                }
            }
            f.blocks.push_back({k, 1, d, 0.0, 0.0});
        } else {
            const double a = w(k, k);
            const double b = w(k + 1, k);
            const double c = w(k + 1, k + 1);
            const double det = a * c - b * b;
            const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
            if (det == 0.0 || !(std::abs(det) > tol * scale)) {
                throw SingularError("ldlt_factor: singular 2x2 pivot", k);
            }
            for (std::size_t i = k + 2; i < n; ++i) {
                const double w1 = w(i, k);
                const double w2 = w(i, k + 1);
                l(i, k) = (w1 * c - w2 * b) / det;
                l(i, k + 1) = (w2 * a - w1 * b) / det;
            }
            for (std::size_t i = k + 2; i < n; ++i) {
                const double l1 = l(i, k);
                const double l2 = l(i, k + 1);
                for (std::size_t j = k + 2; j <= i; ++j) {
                    w(i, j) -= l1 * w(j, k) + l2 * w(j, k + 1);
                }
            }
            for (std::size_t i = k + 2; i < n; ++i) {
                for (std::size_t j = k + 2; j < i; ++j) {
                    w(j, i) = w(i, j);
                }
            }
            f.blocks.push_back({k, 2, a, b, c});
        }
        k += block;
    }
    return f;
}

Vector ldlt_solve(const LdltFactorization& f, const Vector& rhs) {
    const std::size_t n = f.size();
    if (rhs.size() != n) {
        throw DimensionError("ldlt_solve: rhs length", n, rhs.size());
    }
    Vector z = f.perm.gather(rhs);
    z = tri_solve(f.l, z, TriangleShape::lower, false, /*unit_diagonal=*/true);
    for (const auto& blk : f.blocks) {
        const std::size_t s = blk.start;
        if (blk.size == 1) {
            z[s] /= blk.a;
        } else {
            const double det = blk.a * blk.c - blk.b * blk.b;
            const double z1 = z[s];
            const double z2 = z[s + 1];
            z[s] = (blk.c * z1 - blk.b * z2) / det;
            z[s + 1] = (blk.a * z2 - blk.b * z1) / det;
        }
    }
    z = tri_solve(f.l, z, TriangleShape::lower, /*transposed=*/true, /*unit_diagonal=*/true);
    return f.perm.scatter(z);
}

Matrix ldlt_solve(const LdltFactorization& f, const Matrix& rhs) {
    if (rhs.rows() != f.size()) {
        throw DimensionError("ldlt_solve: rhs rows", f.size(), rhs.rows());
    }
    Matrix out(rhs.rows(), rhs.cols());
    for (std::size_t j = 0; j < rhs.cols(); ++j) {
        const Vector col = ldlt_solve(f, rhs.col_vector(j));
        for (std::size_t i = 0; i < rhs.rows(); ++i) {
            out(i, j) = col[i];
        }
    }
    return out;
}

} // namespace abskkt
