#include <doctest.h>

#include "hyperswitch/core_model.hpp"
#include "hyperswitch/errors.hpp"
#include "support.hpp"

using namespace hyperswitch;
using hs_test::Gen;

TEST_CASE("diagonalize_hyperbolic examples") {
    const Diagonalization d = diagonalize_hyperbolic(hs_test::diag2(-1, 1));
    CHECK(d.m == 1);
    CHECK(hs_test::max_abs(d.S - Matrix::Identity(2, 2)) < 1e-14);
    CHECK(d.lambda(0) == -1.0);
    CHECK(d.lambda(1) == 1.0);

    const Matrix swap = hs_test::mat2(0, 1, 1, 0);
    const Diagonalization e = diagonalize_hyperbolic(swap);
    CHECK(e.m == 1);
    CHECK(e.lambda(0) == doctest::Approx(-1.0));
    CHECK(e.lambda(1) == doctest::Approx(1.0));
    CHECK(hs_test::max_abs(e.S.inverse() * e.lambda.asDiagonal() * e.S - swap) <= 1e-10);

    CHECK_THROWS_AS(diagonalize_hyperbolic(hs_test::mat2(0, 1, -1, 0)), NotHyperbolic);
    CHECK_THROWS_AS(diagonalize_hyperbolic(hs_test::mat2(1, 1, 0, 1)), NotHyperbolic);  // Jordan block
    CHECK_THROWS_AS(diagonalize_hyperbolic(hs_test::diag2(0, 1)), NotHyperbolic);
}

TEST_CASE("diagonalize_hyperbolic recovers random spectra") {
    Gen g(21);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = g.integer(1, 5);
        const int negatives = g.integer(0, n);
        const Vector lambda = g.speeds(n, negatives);
        const Matrix s = g.invertible(n);
        const Matrix l = s.inverse() * lambda.asDiagonal() * s;
        const Diagonalization d = diagonalize_hyperbolic(l);
        CHECK(d.m == negatives);
        CHECK(hs_test::max_abs(d.lambda - hs_test::sorted_speeds(lambda)) < 1e-9);
        for (int k = 0; k < n; ++k) CHECK(d.S.row(k).norm() == doctest::Approx(1.0));
        CHECK(hs_test::max_abs(d.S.inverse() * d.lambda.asDiagonal() * d.S - l) <= 1e-10 * hs_test::max_abs(l));
    }
}

TEST_CASE("diagonalize_hyperbolic accepts a repeated speed with a full eigenspace") {
    const Diagonalization d = diagonalize_hyperbolic(Matrix(Vector(hs_test::vec({2, 2, -1})).asDiagonal()));
    CHECK(d.m == 1);
    CHECK(d.lambda(1) == doctest::Approx(2.0));
    CHECK(d.lambda(2) == doctest::Approx(2.0));
}

TEST_CASE("mode_from_physical recovers the reflection matrix of Example A") {
    // w1(1) = -1.2 w2(1),  w2(0) = 0.6 w1(0)
    BoundaryPhysical bp{hs_test::mat2(0, 0, -0.6, 1), hs_test::mat2(1, 1.2, 0, 0)};
    const Mode md = mode_from_physical(hs_test::diag2(-1, 1), Matrix::Zero(2, 2), bp);
    CHECK(md.m() == 1);
    CHECK(hs_test::max_abs(md.G() - hs_test::mat2(0, -1.2, 0.6, 0)) < 1e-12);
    CHECK(hs_test::max_abs(md.F()) == 0.0);
}

TEST_CASE("mode_from_physical scalar and degenerate cases") {
    // w(t,0) = G w(t,1) with G = 2 and source F = -1
    BoundaryPhysical bp{hs_test::scalar(1.0), hs_test::scalar(-2.0)};
    const Mode md = mode_from_physical(hs_test::scalar(1.0), hs_test::scalar(-1.0), bp);
    CHECK(md.m() == 0);
    CHECK(md.G()(0, 0) == doctest::Approx(2.0));
    CHECK(md.F()(0, 0) == doctest::Approx(-1.0));

    BoundaryPhysical zero{Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
    CHECK_THROWS_AS(mode_from_physical(hs_test::diag2(-1, 1), Matrix::Zero(2, 2), zero), BoundaryNotReducible);
}

TEST_CASE("mode_from_characteristic") {
    const Mode damped = hs_test::diag_mode(hs_test::vec({-1, 1}), 1, hs_test::diag2(-0.3, -0.3),
                                           hs_test::mat2(0, -1.2, 0.6, 0));
    CHECK(damped.has_diagonal_source());
    CHECK(damped.lambda_abs()(0) == 1.0);

    CHECK_THROWS_AS(hs_test::diag_mode(hs_test::vec({1, -1}), 1, Matrix::Zero(2, 2), Matrix::Zero(2, 2)), BadPartition);

    const Mode b = hs_test::diag_mode(hs_test::vec({1}), 0, hs_test::scalar(-1), hs_test::scalar(2));
    CHECK(b.n() == 1);
    CHECK(b.m() == 0);
    CHECK(b.G()(0, 0) == 2.0);
}

TEST_CASE("lambda_abs equals Lambda on the positive block and -Lambda on the negative block") {
    Gen g(8);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = g.integer(1, 5);
        const Mode md = hs_test::characteristic_mode(g, n, g.integer(0, n), 1.0, 1.0);
        for (int k = 0; k < n; ++k) {
            const double expect = k < md.m() ? -md.lambda()(k) : md.lambda()(k);
            CHECK(md.lambda_abs()(k) == expect);
        }
    }
}

TEST_CASE("physical emission round-trips Lambda, m and G") {
    Gen g(4);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = g.integer(1, 4);
        const int m = g.integer(0, n);
        const Matrix s = g.invertible(n);
        const Vector lambda = g.speeds(n, m);
        const Matrix l = s.inverse() * lambda.asDiagonal() * s;
        const Matrix a = g.matrix(n, n);
        const Diagonalization d = diagonalize_hyperbolic(l);
        // Boundary built in characteristic variables of the canonical S.
        const Matrix gm = g.matrix(n, n, 1.5);
        Matrix g0 = Matrix::Zero(n, n), g1 = Matrix::Zero(n, n);
        // rows: y-(1) - G[:m] (y-(0), y+(1)) = 0 and y+(0) - G[m:] (...) = 0
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                const double v = -gm(r, c);
                if (c < d.m) g0(r, c) += v; else g1(r, c) += v;
            }
            if (r < d.m) g1(r, r) += 1.0; else g0(r, r) += 1.0;
        }
        const Mode md = mode_from_physical(l, a, BoundaryPhysical{g0 * d.S, g1 * d.S});
        CHECK(md.m() == m);
        CHECK(hs_test::max_abs(md.G() - gm) < 1e-9);

        const BoundaryPhysical back = md.to_physical_boundary();
        const Mode again = mode_from_physical(md.L(), md.A(), back);
        CHECK(again.m() == md.m());
        CHECK(hs_test::max_abs(again.lambda() - md.lambda()) <= 1e-10 * md.max_speed());
        CHECK(hs_test::max_abs(again.G() - md.G()) < 1e-9);
        CHECK(hs_test::max_abs(again.F() - md.F()) < 1e-9);
    }
}

TEST_CASE("SwitchedSystem structure queries") {
    const SwitchedSystem a = hs_test::example_a(0.0);
    CHECK(a.size() == 2);
    CHECK(a.n() == 2);
    CHECK(a.common_sign_structure());
    CHECK_FALSE(a.all_one_signed());

    const SwitchedSystem b = hs_test::example_b(-1.0, 2.0);
    CHECK_FALSE(b.common_sign_structure());
    CHECK_FALSE(b.all_one_signed());
    const SwitchedSystem pos({b.mode(0), b.mode(0)});
    CHECK(pos.all_one_signed());
    CHECK(pos.common_sign_structure());

    CHECK_THROWS_AS(SwitchedSystem({a.mode(0), b.mode(0)}), DimensionMismatch);
    CHECK_THROWS(SwitchedSystem(std::vector<Mode>{}));
}
