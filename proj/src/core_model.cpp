#include "hyperswitch/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "hyperswitch/errors.hpp"

namespace hyperswitch {

namespace {

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void require_square(const Matrix& m, Eigen::Index n, const char* what) {
    if (m.rows() != n || m.cols() != n)
        throw DimensionMismatch(std::string(what) + " must be " + std::to_string(n) + "x" +
                                std::to_string(n));
}

// Deterministic sign for an eigenvector row: its largest-magnitude entry
// (lowest index on ties) is made positive.
void fix_row_sign(Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
    const double top = row.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < row.size(); ++k) {
        if (std::abs(row(k)) >= top * (1.0 - 1e-12)) {
            if (row(k) < 0.0) row = -row;
            return;
        }
    }
}

void check_partition(const Vector& lambda, int m) {
    const auto n = static_cast<int>(lambda.size());
    if (m < 0 || m > n) throw BadPartition("m must lie in [0, n]");
    for (int k = 0; k < n; ++k) {
        const bool negative_block = k < m;
        if (negative_block ? !(lambda(k) < 0.0) : !(lambda(k) > 0.0)) {
            throw BadPartition("speed " + std::to_string(k) + " = " + std::to_string(lambda(k)) +
                               " violates the sign partition at m = " + std::to_string(m));
        }
        if (std::abs(lambda(k)) < kTolHyp)
            throw NotHyperbolic("characteristic speed below tolerance in magnitude");
        if (k > 0 && (k != m) && lambda(k) < lambda(k - 1))
            throw BadPartition("speeds must be ascending within each sign block");
    }
}

}  // namespace

Diagonalization diagonalize_hyperbolic(const Matrix& L) {
    if (L.rows() != L.cols() || L.rows() == 0) throw DimensionMismatch("L must be square");
    const Eigen::Index n = L.rows();
    const double scale = std::max(max_abs(L), 1e-300);

    Eigen::EigenSolver<Matrix> es(L, true);
    if (es.info() != Eigen::Success) throw NotHyperbolic("eigen decomposition failed");
    const Eigen::VectorXcd ev = es.eigenvalues();
    for (Eigen::Index k = 0; k < n; ++k) {
        if (ev(k).imag() != 0.0)
            throw NotHyperbolic("L has complex eigenvalue " + std::to_string(ev(k).real()) + " + " +
                                std::to_string(ev(k).imag()) + "i");
        if (std::abs(ev(k).real()) < kTolHyp)
            throw NotHyperbolic("L has a (near) zero characteristic speed");
    }

    const Matrix V = es.eigenvectors().real();
    Eigen::FullPivLU<Matrix> lu(V);
    if (!lu.isInvertible()) throw NotHyperbolic("L is defective (eigenvectors are dependent)");
    Matrix left = lu.inverse();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double la = ev(a).real();
        const double lb = ev(b).real();
        if ((la < 0.0) != (lb < 0.0)) return la < 0.0;
        return la < lb;
    });

    Diagonalization d{Matrix(n, n), Vector(n), 0};
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        d.lambda(k) = ev(src).real();
        d.S.row(k) = left.row(src) / left.row(src).norm();
        fix_row_sign(d.S.row(k));
        if (d.lambda(k) < 0.0) ++d.m;
    }

    const Matrix recon = d.S.inverse() * d.lambda.asDiagonal() * d.S;
    const double residual = max_abs(recon - L);
    if (!(residual <= kTolRecon * scale)) {
        throw NotHyperbolic("L is defective or ill-conditioned: reconstruction residual " +
                            std::to_string(residual));
    }
    return d;
}

bool Mode::has_diagonal_source() const {
    const Matrix off = F_ - Matrix(F_.diagonal().asDiagonal());
    return max_abs(off) <= kTolRecon * std::max(max_abs(F_), 1.0);
}

BoundaryPhysical Mode::to_physical_boundary() const {
    const int nn = n();
    const int mm = m_;
    Matrix g0 = Matrix::Zero(nn, nn);
    Matrix g1 = Matrix::Zero(nn, nn);
    g0.topLeftCorner(mm, mm) = -G_mm();
    g0.bottomLeftCorner(nn - mm, mm) = -G_pm();
    g0.bottomRightCorner(nn - mm, nn - mm).setIdentity();
    g1.topLeftCorner(mm, mm).setIdentity();
    g1.topRightCorner(mm, nn - mm) = -G_mp();
    g1.bottomRightCorner(nn - mm, nn - mm) = -G_pp();
    return {g0 * S_, g1 * S_};
}

void Mode::validate() const {
    const double l_scale = max_abs(L_);
    const double recon = max_abs(S_inv_ * lambda_.asDiagonal() * S_ - L_);
    if (recon > kTolRecon * std::max(l_scale, 1e-300))
        throw NotHyperbolic("mode: S^-1 Lambda S does not reconstruct L");
    const double a_scale = max_abs(A_);
    const double f_err = max_abs(S_ * A_ * S_inv_ - F_);
    if (f_err > kTolRecon * a_scale && !(a_scale == 0.0 && f_err == 0.0))
        throw NotHyperbolic("mode: S A S^-1 does not reproduce F");
}

Mode mode_from_physical(const Matrix& L, const Matrix& A, const BoundaryPhysical& bp) {
    const Eigen::Index n = L.rows();
    require_square(L, n, "L");
    require_square(A, n, "A");
    require_square(bp.B0, n, "B0");
    require_square(bp.B1, n, "B1");

    const Diagonalization d = diagonalize_hyperbolic(L);
    Mode mode;
    mode.L_ = L;
    mode.A_ = A;
    mode.S_ = d.S;
    mode.S_inv_ = d.S.inverse();
    mode.lambda_ = d.lambda;
    mode.m_ = d.m;
    mode.F_ = d.S * A * mode.S_inv_;

    // Rewrite the boundary as P * incoming + R * outgoing = 0 with
    // incoming = (y-(1), y+(0)), outgoing = (y-(0), y+(1)).
    const Matrix c0 = bp.B0 * mode.S_inv_;
    const Matrix c1 = bp.B1 * mode.S_inv_;
    const int m = d.m;
    const auto p = static_cast<int>(n) - m;
    Matrix P(n, n), R(n, n);
    P << c1.leftCols(m), c0.rightCols(p);
    R << c0.leftCols(m), c1.rightCols(p);

    Eigen::JacobiSVD<Matrix> svd(P);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    if (smax == 0.0 || sv(sv.size() - 1) <= kTolRecon * smax) {
        throw BoundaryNotReducible(
            "boundary conditions do not uniquely determine the incoming characteristics");
    }
    mode.G_ = -P.fullPivLu().solve(R);
    mode.validate();
    return mode;
}

Mode mode_from_characteristic(const Vector& lambda, int m, const Matrix& F, const Matrix& G) {
    const Eigen::Index n = lambda.size();
    if (n == 0) throw DimensionMismatch("Lambda is empty");
    require_square(F, n, "F");
    require_square(G, n, "G");
    check_partition(lambda, m);

    Mode mode;
    mode.lambda_ = lambda;
    mode.m_ = m;
    mode.L_ = lambda.asDiagonal();
    mode.A_ = F;
    mode.F_ = F;
    mode.G_ = G;
    mode.S_ = Matrix::Identity(n, n);
    mode.S_inv_ = Matrix::Identity(n, n);
    return mode;
}

SwitchedSystem::SwitchedSystem(std::vector<Mode> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw std::invalid_argument("switched system needs at least one mode");
    n_ = modes_.front().n();
    for (const Mode& md : modes_)
        if (md.n() != n_) throw DimensionMismatch("all modes must share the state dimension");
}

bool SwitchedSystem::common_sign_structure() const {
    return std::all_of(modes_.begin(), modes_.end(),
                       [&](const Mode& md) { return md.m() == modes_.front().m(); });
}

bool SwitchedSystem::all_one_signed() const {
    const bool all_pos =
        std::all_of(modes_.begin(), modes_.end(), [](const Mode& md) { return md.m() == 0; });
    const bool all_neg =
        std::all_of(modes_.begin(), modes_.end(), [](const Mode& md) { return md.m() == md.n(); });
    return all_pos || all_neg;
}

}  // namespace hyperswitch
