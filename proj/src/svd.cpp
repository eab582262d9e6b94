#include "abskkt/error.hpp"
#include "abskkt/reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace abskkt {

Vector singular_values(const Matrix& m) {
    // One-sided (Hestenes) Jacobi on the columns of whichever orientation has
    // fewer columns. Columns are stored as rows of `u` for contiguous access.
    Matrix u = m.rows() >= m.cols() ? transpose(m) : m;
    const std::size_t q = u.rows();
    const std::size_t len = u.cols();
    const double eps = std::numeric_limits<double>::epsilon();

    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < q; ++i) {
            auto ui = u.row(i);
            for (std::size_t j = i + 1; j < q; ++j) {
                auto uj = u.row(j);
                double alpha = 0.0;
                double beta = 0.0;
                double gamma = 0.0;
                for (std::size_t k = 0; k < len; ++k) {
                    alpha += ui[k] * ui[k];
                    beta += uj[k] * uj[k];
                    gamma += ui[k] * uj[k];
                }
                if (gamma == 0.0 || alpha == 0.0 || beta == 0.0 ||
                    std::abs(gamma) <= eps * std::sqrt(alpha) * std::sqrt(beta)) {
                    continue;
                }
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = c * t;
                for (std::size_t k = 0; k < len; ++k) {
                    const double a = ui[k];
                    const double b = uj[k];
                    ui[k] = c * a - s * b;
                    uj[k] = s * a + c * b;
                }
            }
        }
        if (!rotated) {
            break;
        }
    }

    std::vector<double> sigma(q);
    for (std::size_t i = 0; i < q; ++i) {
        sigma[i] = norm_2(u.row_vector(i));
    }
    std::sort(sigma.begin(), sigma.end(), std::greater<>());
    return Vector(std::move(sigma));
}

double condition_estimate(const Matrix& m) {
    if (!m.square()) {
        throw DimensionError("condition_estimate: matrix must be square", m.rows(), m.cols());
    }
    const Vector sigma = singular_values(m);
    if (sigma.empty()) {
        return 1.0;
    }
    const double smin = sigma[sigma.size() - 1];
    if (smin == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return sigma[0] / smin;
}

} // namespace abskkt
