#pragma once

// Small dense symmetric kernels used by the certifier (n <= 64).

#include <Eigen/Dense>

namespace hyperswitch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Acceptance threshold on lambda_min for the non-strict matrix inequalities.
inline constexpr double kTolFeas = 1e-9;
/// Kernel threshold, relative to the largest eigenvalue.
inline constexpr double kTolKer = 1e-8;
/// Rank threshold for null-space extraction, relative to the largest singular value.
inline constexpr double kTolRank = 1e-9;

/// Real symmetric matrix. Construction checks symmetry to 1e-12 relative and
/// then symmetrizes, so downstream code may rely on exact symmetry.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(const Matrix& m);

    /// Wraps a matrix the caller has built symmetric by construction; it is
    /// still symmetrized but not checked.
    static SymMatrix trusted(const Matrix& m);

    Eigen::Index size() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    double operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

private:
    struct Trusted {};
    SymMatrix(const Matrix& m, Trusted);
    Matrix m_;
};

struct SymEig {
    Vector values;   // ascending
    Matrix vectors;  // columns, orthonormal
};

/// Cyclic Jacobi eigensolver. Throws NoConvergence when the sweep budget is
/// exhausted before the off-diagonal mass drops below tolerance.
SymEig sym_eig(const SymMatrix& m);

/// lambda_min(M). "M >= 0 up to tolerance" is psd_margin(M) >= -kTolFeas.
double psd_margin(const SymMatrix& m);

/// lambda_min together with a unit eigenvector for it.
std::pair<double, Vector> min_eigenpair(const SymMatrix& m);

/// Orthonormal basis (q x r) of ker(E) for a p x q matrix E; rank decided at
/// tol_rank relative to the largest singular value.
Matrix null_space_basis(const Matrix& e, double tol_rank = kTolRank);

/// Smallest gamma with Mi <= gamma * Mj, evaluated on the orthogonal
/// complement of ker(Mj). Throws KernelMismatch when ker(Mj) is not contained
/// in ker(Mi): no finite gamma exists. Returns 0 when Mj vanishes entirely
/// (and then so must Mi).
double min_gamma(const SymMatrix& mi, const SymMatrix& mj, double tol_ker = kTolKer);

}  // namespace hyperswitch
