#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "hyperswitch/densela.hpp"
#include "hyperswitch/errors.hpp"
#include "support.hpp"

using namespace hyperswitch;
using hs_test::Gen;

TEST_CASE("sym_eig on small closed-form inputs") {
    const SymEig d = sym_eig(SymMatrix(Matrix(Vector(hs_test::vec({3, 1, 2})).asDiagonal())));
    CHECK(d.values(0) == doctest::Approx(1.0));
    CHECK(d.values(1) == doctest::Approx(2.0));
    CHECK(d.values(2) == doctest::Approx(3.0));

    const SymEig s = sym_eig(SymMatrix(hs_test::mat2(0, 1, 1, 0)));
    CHECK(s.values(0) == doctest::Approx(-1.0));
    CHECK(s.values(1) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstructs random symmetric matrices and matches Eigen") {
    Gen g(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = g.integer(1, 8);
        const Matrix a = g.symmetric(n, 3.0);
        const SymEig d = sym_eig(SymMatrix(a));
        const Matrix recon = d.vectors * d.values.asDiagonal() * d.vectors.transpose();
        CHECK(hs_test::max_abs(recon - a) < 1e-12 * (1.0 + hs_test::max_abs(a)));
        CHECK(hs_test::max_abs(d.vectors.transpose() * d.vectors - Matrix::Identity(n, n)) < 1e-12);
        for (int k = 0; k + 1 < n; ++k) CHECK(d.values(k) <= d.values(k + 1));

        Eigen::SelfAdjointEigenSolver<Matrix> ref(a);
        CHECK(hs_test::max_abs(ref.eigenvalues() - d.values) < 1e-11);
    }
}

TEST_CASE("SymMatrix rejects asymmetric and non-square input") {
    CHECK_THROWS_AS(SymMatrix(hs_test::mat2(1, 2, 0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(SymMatrix(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("psd_margin") {
    CHECK(psd_margin(SymMatrix(Matrix::Identity(3, 3))) == doctest::Approx(1.0));
    CHECK(psd_margin(SymMatrix(hs_test::diag2(0, 2))) == doctest::Approx(0.0));
    // eigenvalues 1 +- 2
    CHECK(psd_margin(SymMatrix(hs_test::mat2(1, 2, 2, 1))) == doctest::Approx(-1.0));
}

TEST_CASE("min_eigenpair returns a unit eigenvector") {
    Gen g(5);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = g.symmetric(4);
        const auto [lam, v] = min_eigenpair(SymMatrix(a));
        CHECK(v.norm() == doctest::Approx(1.0));
        CHECK(hs_test::max_abs(a * v - lam * v) < 1e-10);
    }
}

TEST_CASE("null_space_basis") {
    SUBCASE("single row") {
        Matrix e(1, 2);
        e << 1, -1;
        const Matrix b = null_space_basis(e);
        REQUIRE(b.cols() == 1);
        CHECK(std::abs(b(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(b(0, 0) == doctest::Approx(b(1, 0)));
    }
    SUBCASE("zero matrix keeps every direction") {
        const Matrix b = null_space_basis(Matrix::Zero(3, 5));
        CHECK(b.cols() == 5);
        CHECK(hs_test::max_abs(b.transpose() * b - Matrix::Identity(5, 5)) < 1e-12);
    }
    SUBCASE("random rank-deficient 4x6") {
        Gen g(3);
        for (int trial = 0; trial < 20; ++trial) {
            const int rank = g.integer(1, 3);
            const Matrix e = g.matrix(4, rank) * g.matrix(rank, 6);
            const Matrix b = null_space_basis(e);
            CHECK(b.cols() == 6 - rank);
            CHECK(hs_test::max_abs(e * b) < 1e-10);
            CHECK(hs_test::max_abs(b.transpose() * b - Matrix::Identity(b.cols(), b.cols())) < 1e-10);
        }
    }
}

TEST_CASE("min_gamma examples") {
    // Example A: M+ weights with Q1+ = 2 and Q2+ = 1 compare with gamma = 2.
    CHECK(min_gamma(SymMatrix(hs_test::diag2(0, 2)), SymMatrix(hs_test::diag2(0, 1))) == doctest::Approx(2.0));
    const Matrix p = hs_test::mat2(2, 1, 1, 3);
    CHECK(min_gamma(SymMatrix(p), SymMatrix(p)) == doctest::Approx(1.0));
    CHECK_THROWS_AS(min_gamma(SymMatrix(hs_test::diag2(1, 0)), SymMatrix(hs_test::diag2(0, 1))), KernelMismatch);
}

namespace {

// Random PSD pair sharing a kernel of dimension n - r.
std::pair<Matrix, Matrix> psd_pair(Gen& g, int n, int r) {
    const Matrix basis = g.matrix(n, r);
    auto make = [&] {
        const Matrix c = g.matrix(r, r) + 2.0 * Matrix::Identity(r, r);
        return Matrix(basis * (c * c.transpose()) * basis.transpose());
    };
    return {make(), make()};
}

}  // namespace

TEST_CASE("min_gamma agrees with bisection on the PSD test") {
    Gen g(17);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = g.integer(1, 4);
        const int r = g.integer(1, n);
        const auto [mi, mj] = psd_pair(g, n, r);
        const double gamma = min_gamma(SymMatrix(mi), SymMatrix(mj));

        // Brute force: the PSD test of gamma Mj - Mi restricted to range(Mj).
        const Eigen::SelfAdjointEigenSolver<Matrix> es(mj);
        const Matrix u = es.eigenvectors().rightCols(r);
        auto feasible = [&](double gm) {
            const Matrix d = u.transpose() * (gm * mj - mi) * u;
            return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (d + d.transpose())).eigenvalues().minCoeff() >= 0.0;
        };
        double lo = 0.0, hi = 1.0;
        while (!feasible(hi)) hi *= 2.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mid) ? hi : lo) = mid;
        }
        CHECK(gamma == doctest::Approx(hi).epsilon(1e-6));
        CHECK(psd_margin(SymMatrix::trusted(gamma * mj - mi)) >= -1e-8);
        CHECK(psd_margin(SymMatrix::trusted(gamma * (1.0 - 1e-3) * mj - mi)) < 0.0);
    }
}
