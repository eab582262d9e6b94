#include "abskkt/dense.hpp"
#include "abskkt/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace abskkt;
using abskkt::test::kEps;

TEST_SUITE("mat_vec") {
    TEST_CASE("identity, row sum and zero matrix") {
        CHECK(mat_vec(Matrix::identity(2), Vector{3, -4}) == Vector{3, -4});
        CHECK(mat_vec(Matrix{{1, 1}}, Vector{2, 5}) == Vector{7});
        CHECK(mat_vec(Matrix(2, 2), Vector{9, 9}) == Vector{0, 0});
    }

    TEST_CASE("dimension mismatch names both sizes") {
        try {
            mat_vec(Matrix(2, 3), Vector{1, 2});
            FAIL("expected DimensionError");
        } catch (const DimensionError& e) {
            CHECK(e.expected() == 3);
            CHECK(e.actual() == 2);
        }
    }
}

TEST_SUITE("mat_tvec") {
    TEST_CASE("hand cases") {
        CHECK(mat_tvec(Matrix{{1, 2}, {3, 4}}, Vector{1, 0}) == Vector{1, 2});
        CHECK(mat_tvec(Matrix::identity(3), Vector{1, 2, 3}) == Vector{1, 2, 3});
        CHECK(mat_tvec(Matrix{{1, 1, 1}}, Vector{2}) == Vector{2, 2, 2});
    }

    TEST_CASE("bitwise equal to mat_vec of the transpose") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const Matrix a = test::random_matrix(7 + seed, 13, seed);
            const Vector v = test::random_vector(a.rows(), seed + 100);
            CHECK(mat_tvec(a, v) == mat_vec(transpose(a), v));
        }
    }

    TEST_CASE("mismatch throws") {
        CHECK_THROWS_AS(mat_tvec(Matrix(2, 3), Vector{1, 2, 3}), DimensionError);
    }
}

TEST_CASE("mat_mul against hand product") {
    const Matrix a{{1, 2}, {3, 4}};
    const Matrix b{{0, 1}, {1, 0}};
    CHECK(mat_mul(a, b) == Matrix{{2, 1}, {4, 3}});
    CHECK_THROWS_AS(mat_mul(Matrix(2, 3), Matrix(2, 3)), DimensionError);
}

TEST_SUITE("rank1_update") {
    TEST_CASE("hand cases") {
        const Matrix i2 = Matrix::identity(2);
        CHECK(rank1_update(i2, Vector{1, 0}, Vector{1, 0}, 1.0) == Matrix{{0, 0}, {0, 1}});
        CHECK(rank1_update(i2, Vector{5, 6}, Vector{7, 8}, 0.0) == i2);
        CHECK(rank1_update(i2, Vector{1, 1}, Vector{1, 0}, 1.0) == Matrix{{0, 0}, {-1, 1}});
    }

    TEST_CASE("errors") {
        const Matrix i2 = Matrix::identity(2);
        CHECK_THROWS_AS(rank1_update(i2, Vector{1}, Vector{1, 0}, 1.0), DimensionError);
        CHECK_THROWS_AS(rank1_update(i2, Vector{1, 0}, Vector{1, 0},
                                     std::numeric_limits<double>::infinity()),
                        Error);
        CHECK_THROWS_AS(rank1_update(i2, Vector{1, 0}, Vector{1, 0},
                                     std::numeric_limits<double>::quiet_NaN()),
                        Error);
    }

    TEST_CASE("symmetric input with u == w stays exactly symmetric") {
        const Matrix h = test::random_symmetric(9, 3);
        const Vector u = test::random_vector(9, 4);
        const Matrix out = rank1_update(h, u, u, 0.37);
        CHECK(out == transpose(out));
    }
}

TEST_SUITE("tri_solve") {
    const Matrix l{{2, 0}, {1, 1}};

    TEST_CASE("lower, identity and transposed") {
        CHECK(tri_solve(l, Vector{2, 3}, TriangleShape::lower) == Vector{1, 2});
        CHECK(tri_solve(Matrix::identity(3), Vector{4, 5, 6}, TriangleShape::lower) == Vector{4, 5, 6});
        CHECK(tri_solve(l, Vector{4, 2}, TriangleShape::lower, /*transposed=*/true) == Vector{1, 2});
    }

    TEST_CASE("upper and unit diagonal") {
        const Matrix u{{2, 1}, {0, 4}};
        CHECK(tri_solve(u, Vector{4, 8}, TriangleShape::upper) == Vector{1, 2});
        CHECK(tri_solve(Matrix{{9, 1}, {0, 9}}, Vector{3, 1}, TriangleShape::upper, false, true) ==
              Vector{2, 1});
    }

    TEST_CASE("zero pivot reports its index") {
        try {
            tri_solve(Matrix{{1, 0}, {1, 0}}, Vector{1, 1}, TriangleShape::lower);
            FAIL("expected SingularError");
        } catch (const SingularError& e) {
            CHECK(e.index() == 1);
        }
        CHECK_THROWS_AS(tri_solve(Matrix{{1e-3, 0}, {0, 1}}, Vector{1, 1}, TriangleShape::lower,
                                  false, false, 1e-2),
                        SingularError);
    }

    TEST_CASE("residual bound on random well-conditioned triangles") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const std::size_t n = 5 + 3 * seed;
            const Matrix lo = test::random_lower(n, seed);
            const Vector rhs = test::random_vector(n, seed + 50);
            for (bool transposed : {false, true}) {
                const Vector r = tri_solve(lo, rhs, TriangleShape::lower, transposed);
                const Vector back = transposed ? mat_tvec(lo, r) : mat_vec(lo, r);
                CHECK(norm_inf(back - rhs) <= 64 * kEps * norm_inf(lo) * norm_inf(r));
            }
            const Matrix up = transpose(lo);
            const Vector r = tri_solve(up, rhs, TriangleShape::upper);
            CHECK(norm_inf(mat_vec(up, r) - rhs) <= 64 * kEps * norm_inf(up) * norm_inf(r));
        }
    }
}

TEST_CASE("norms and dot") {
    CHECK(norm_inf(Vector{1, -5, 3}) == 5);
    CHECK(dot(Vector{1, 0}, Vector{0, 1}) == 0);
    CHECK(dot(Vector{3, 4}, Vector{3, 4}) == 25);
    CHECK(norm_2(Vector{3, 4}) == doctest::Approx(5.0));
    CHECK(norm_inf(Matrix{{1, -2}, {3, 0}}) == 3);
    CHECK(max_abs(Matrix{{1, -7}, {3, 0}}) == 7);
    CHECK_THROWS_AS(dot(Vector{1}, Vector{1, 2}), DimensionError);
}

TEST_SUITE("Permutation") {
    TEST_CASE("rejects non-bijections") {
        CHECK_THROWS_AS(Permutation(std::vector<std::size_t>{0, 0}), DimensionError);
        CHECK_THROWS_AS(Permutation(std::vector<std::size_t>{0, 2}), DimensionError);
    }

    TEST_CASE("gather/scatter round trip on vectors and columns") {
        Permutation p(5);
        p.swap(0, 3);
        p.swap(1, 4);
        p.swap(3, 2);
        CHECK_FALSE(p.is_identity());
        const Vector v{10, 11, 12, 13, 14};
        const Vector g = p.gather(v);
        for (std::size_t j = 0; j < 5; ++j) {
            CHECK(g[j] == v[p.at(j)]);
        }
        CHECK(p.scatter(g) == v);
        CHECK(p.inverse().gather(g) == v);

        const Matrix m = test::random_matrix(3, 5, 8);
        CHECK(p.scatter_columns(p.gather_columns(m)) == m);
        CHECK(p.gather_columns(m).col_vector(2) == m.col_vector(p.at(2)));
    }
}

TEST_CASE("Matrix literal must be rectangular") {
    CHECK_THROWS_AS((Matrix{{1, 2}, {3}}), DimensionError);
    const Matrix m{{1, 2, 3}, {4, 5, 6}};
    CHECK(m.rows() == 2);
    CHECK(m.cols() == 3);
    CHECK(m(1, 2) == 6);
    CHECK(m.row_vector(1) == Vector{4, 5, 6});
    CHECK(concat(Vector{1}, Vector{2, 3}) == Vector{1, 2, 3});
}
