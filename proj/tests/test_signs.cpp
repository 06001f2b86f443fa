#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "spatsign/errors.hpp"
#include "spatsign/signs.hpp"
#include "support/test_helpers.hpp"

using namespace spatsign;

TEST_CASE("spatial_sign: normalization, zero branch, scale invariance") {
    const double y[] = {3.0, 4.0};
    const Vec u = spatial_sign(y);
    CHECK(u[0] == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(u[1] == doctest::Approx(0.8).epsilon(1e-15));

    const double z[] = {0.0, 0.0};
    const Vec uz = spatial_sign(z);
    CHECK(uz[0] == 0.0);
    CHECK(uz[1] == 0.0);

    const double yc[] = {7.0 * 3.0, 7.0 * 4.0};
    const Vec uc = spatial_sign(yc);
    CHECK(uc[0] == doctest::Approx(0.6).epsilon(1e-14));
    CHECK(uc[1] == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("spatial_sign_into returns the norm") {
    const double y[] = {3.0, 4.0};
    Vec out(2);
    CHECK(spatial_sign_into(y, out) == doctest::Approx(5.0));
    CHECK(norm2(out) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("spatial_sign: rotation equivariance") {
    std::mt19937_64 rng(31415);
    for (int trial = 0; trial < 20; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 4);
        const Matrix o = testsupport::random_orthogonal(p, rng);
        const Vec y = testsupport::gaussian_vec(p, rng);
        const Vec lhs = spatial_sign(matvec(o, y));
        const Vec rhs = matvec(o, spatial_sign(y));
        CHECK(testsupport::max_abs_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("sign_hessian: hand values and zero branch") {
    const double e1[] = {1.0, 0.0};
    const SymMatrix a1 = sign_hessian(e1);
    CHECK(a1(0, 0) == doctest::Approx(0.0));
    CHECK(a1(1, 1) == doctest::Approx(1.0));
    CHECK(a1(0, 1) == doctest::Approx(0.0));

    const double z[] = {0.0, 0.0};
    CHECK(sign_hessian(z).frobenius() == 0.0);

    const double e2[] = {2.0, 0.0};
    const SymMatrix a2 = sign_hessian(e2);
    CHECK(a2(1, 1) == doctest::Approx(0.5));
    CHECK(a2(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("sign_hessian: null space and spectrum structure") {
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 10; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 4);
        const Vec y = testsupport::gaussian_vec(p, rng);
        const SymMatrix a = sign_hessian(y);
        const Vec ay = sym_matvec(a, y);
        CHECK(norm2(ay) < 1e-12 * std::max(1.0, norm2(y)));

        // Eigenvalues: 0 once, 1/||y|| with multiplicity p-1.
        const auto ed = sym_eigen(a);
        const double inv_r = 1.0 / norm2(y);
        for (int k = 0; k < p - 1; ++k) CHECK(ed.values[k] == doctest::Approx(inv_r).epsilon(1e-10));
        CHECK(std::abs(ed.values[p - 1]) < 1e-12);
    }
}

TEST_CASE("sign_outer: hand values, zero branch, trace") {
    const double e1[] = {1.0, 0.0};
    const SymMatrix b1 = sign_outer(e1);
    CHECK(b1(0, 0) == doctest::Approx(1.0));
    CHECK(b1(1, 1) == doctest::Approx(0.0));

    const double v[] = {1.0, 1.0};
    const SymMatrix b2 = sign_outer(v);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(b2(i, j) == doctest::Approx(0.5).epsilon(1e-14));

    const double z[] = {0.0, 0.0};
    CHECK(sign_outer(z).frobenius() == 0.0);

    std::mt19937_64 rng(4242);
    const Vec y = testsupport::gaussian_vec(3, rng);
    CHECK(sign_outer(y).trace() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("sign_hessian = (I - sign_outer)/||y||") {
    std::mt19937_64 rng(999);
    const Vec y = testsupport::gaussian_vec(4, rng);
    const double inv_r = 1.0 / norm2(y);
    SymMatrix expect = SymMatrix::identity(4);
    const SymMatrix b = sign_outer(y);
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) expect.set(i, j, inv_r * (expect(i, j) - b(i, j)));
    CHECK(frobenius_distance(sign_hessian(y), expect) < 1e-12);
}

TEST_CASE("DataMatrix: validation") {
    CHECK_THROWS_AS(DataMatrix(0, 2), InvalidInput);
    CHECK_THROWS_AS(DataMatrix(3, 1), InvalidInput);
    CHECK_THROWS_AS(DataMatrix(2, 2, {1.0, 2.0, 3.0}), InvalidInput);
    CHECK_THROWS_AS(DataMatrix(1, 2, {1.0, std::numeric_limits<double>::infinity()}), InvalidInput);
    const DataMatrix d(2, 2, {1.0, 2.0, 3.0, 4.0});
    CHECK(d.row(1)[0] == 3.0);
}

TEST_CASE("walsh_averages: counts and basic enumeration") {
    const DataMatrix d2(2, 2, {0.0, 0.0, 2.0, 2.0});
    const WalshStream w2 = walsh_averages(d2);
    CHECK(w2.count() == 1);
    Vec z(2);
    w2.average_at(0, z);
    CHECK(z[0] == 1.0);
    CHECK(z[1] == 1.0);

    const DataMatrix d3(3, 2, {1.0, 0.0, 0.0, 1.0, 1.0, 1.0});
    const WalshStream w3 = walsh_averages(d3);
    CHECK(w3.count() == 3);
    w3.average_at(0, z);  // (rows 0,1)
    CHECK(z[0] == 0.5);
    CHECK(z[1] == 0.5);
    w3.average_at(2, z);  // (rows 1,2)
    CHECK(z[0] == 0.5);
    CHECK(z[1] == 1.0);

    std::mt19937_64 rng(10);
    const DataMatrix d10 = testsupport::gaussian_data(10, 2, rng);
    CHECK(walsh_averages(d10).count() == 45);

    CHECK_THROWS_AS(walsh_averages(DataMatrix(1, 2)), InvalidInput);
}

TEST_CASE("walsh_averages: pair_at matches nested-loop order") {
    std::mt19937_64 rng(11);
    for (int n : {2, 3, 7, 23}) {
        const DataMatrix d = testsupport::gaussian_data(n, 2, rng);
        const WalshStream w = walsh_averages(d);
        std::int64_t t = 0;
        for (int i = 0; i < n - 1; ++i)
            for (int j = i + 1; j < n; ++j, ++t) {
                const auto [pi, pj] = w.pair_at(t);
                CHECK(pi == i);
                CHECK(pj == j);
            }
        CHECK(t == w.count());
    }
}

TEST_CASE("walsh_averages: shift linearity is exact on dyadic data") {
    // Dyadic entries keep every sum exact, so the identity holds bitwise.
    const DataMatrix d(3, 2, {1.25, -0.5, 2.0, 0.75, -1.5, 3.25});
    const Vec a = {2.5, -1.75};
    DataMatrix shifted(3, 2);
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 2; ++k) shifted.row(i)[k] = d.row(i)[k] + a[k];

    const WalshStream w = walsh_averages(d);
    const WalshStream ws = walsh_averages(shifted);
    Vec z(2), zs(2);
    for (std::int64_t t = 0; t < w.count(); ++t) {
        w.average_at(t, z);
        ws.average_at(t, zs);
        CHECK(zs[0] == z[0] + a[0]);
        CHECK(zs[1] == z[1] + a[1]);
    }
}

TEST_CASE("signed_rank_fn: single point and antisymmetric pair") {
    const DataMatrix one(1, 2, {2.0, 0.0});
    const double e[] = {2.0, 0.0};
    const Vec q = signed_rank_fn(one, e);
    CHECK(q[0] == doctest::Approx(1.0));
    CHECK(q[1] == doctest::Approx(0.0));

    const DataMatrix pair(2, 2, {1.0, 2.0, -1.0, -2.0});
    const double zero[] = {0.0, 0.0};
    const Vec q0 = signed_rank_fn(pair, zero);
    CHECK(std::abs(q0[0]) < 1e-15);
    CHECK(std::abs(q0[1]) < 1e-15);
}

TEST_CASE("signed_rank_fn: direct summation oracle and norm bound") {
    std::mt19937_64 rng(52);
    const DataMatrix d = testsupport::gaussian_data(5, 2, rng);
    const Vec e = {0.0, 0.0};

    // Independent recomputation of n^{-1} sum_i u((y_i + e)/2).
    Vec expect(2, 0.0);
    for (int i = 0; i < d.n(); ++i) {
        double z0 = 0.5 * (d.row(i)[0] + e[0]);
        double z1 = 0.5 * (d.row(i)[1] + e[1]);
        const double r = std::sqrt(z0 * z0 + z1 * z1);
        if (r > 0.0) {
            expect[0] += z0 / r;
            expect[1] += z1 / r;
        }
    }
    expect[0] /= d.n();
    expect[1] /= d.n();

    const Vec q = signed_rank_fn(d, e);
    CHECK(testsupport::max_abs_diff(q, expect) < 1e-15);
    CHECK(norm2(q) <= 1.0 + 1e-12);

    const double e3[] = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(signed_rank_fn(d, e3), InvalidInput);
}
