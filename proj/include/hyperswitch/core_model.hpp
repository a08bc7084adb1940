#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hyperswitch/densela.hpp"

namespace hyperswitch {

/// Smallest characteristic speed magnitude accepted as nonzero.
inline constexpr double kTolHyp = 1e-9;
/// Relative tolerance for reconstructions (S^-1 Lambda S vs L, S A S^-1 vs F).
inline constexpr double kTolRecon = 1e-10;

struct Diagonalization {
    Matrix S;       // rows: unit-norm left eigenvectors
    Vector lambda;  // negatives first, each block ascending
    int m = 0;      // number of negative speeds
};

/// Physical boundary form B0 w(t,0) + B1 w(t,1) = 0.
struct BoundaryPhysical {
    Matrix B0;
    Matrix B1;
};

/// One hyperbolic mode: dw/dt + L dw/dx = A w, together with its
/// characteristic form y = S w, dy/dt + Lambda dy/dx = F y and the boundary
/// coupling (y-(1), y+(0)) = G (y-(0), y+(1)).
class Mode {
public:
    int n() const noexcept { return static_cast<int>(lambda_.size()); }
    int m() const noexcept { return m_; }
    const Matrix& L() const noexcept { return L_; }
    const Matrix& A() const noexcept { return A_; }
    const Matrix& S() const noexcept { return S_; }
    const Matrix& S_inv() const noexcept { return S_inv_; }
    const Vector& lambda() const noexcept { return lambda_; }
    const Matrix& F() const noexcept { return F_; }
    const Matrix& G() const noexcept { return G_; }

    Matrix Lambda() const { return lambda_.asDiagonal(); }
    /// |Lambda|: equals Lambda on the positive block and -Lambda on the negative one.
    Vector lambda_abs() const { return lambda_.cwiseAbs(); }
    double max_speed() const { return lambda_abs().maxCoeff(); }

    /// Rows of S for the negative (first m) and positive (remaining) speeds.
    Matrix S_minus() const { return S_.topRows(m_); }
    Matrix S_plus() const { return S_.bottomRows(n() - m_); }

    Matrix G_mm() const { return G_.topLeftCorner(m_, m_); }
    Matrix G_mp() const { return G_.topRightCorner(m_, n() - m_); }
    Matrix G_pm() const { return G_.bottomLeftCorner(n() - m_, m_); }
    Matrix G_pp() const { return G_.bottomRightCorner(n() - m_, n() - m_); }

    bool has_diagonal_source() const;

    /// Physical boundary matrices B0 = G0 S, B1 = G1 S built from the
    /// canonical templates of G0 and G1.
    BoundaryPhysical to_physical_boundary() const;

    friend Mode mode_from_physical(const Matrix& L, const Matrix& A, const BoundaryPhysical& bp);
    friend Mode mode_from_characteristic(const Vector& lambda, int m, const Matrix& F,
                                         const Matrix& G);

private:
    Mode() = default;
    void validate() const;

    Matrix L_, A_, S_, S_inv_, F_, G_;
    Vector lambda_;
    int m_ = 0;
};

/// Diagonalizes a hyperbolic transport matrix: L = S^-1 diag(lambda) S.
/// Throws NotHyperbolic for complex or defective spectra and for speeds
/// below kTolHyp in magnitude.
Diagonalization diagonalize_hyperbolic(const Matrix& L);

/// Builds a mode from its physical description. The boundary pair is
/// reduced to G by solving for the incoming characteristics; throws
/// BoundaryNotReducible when they are not uniquely determined.
Mode mode_from_physical(const Matrix& L, const Matrix& A, const BoundaryPhysical& bp);

/// Direct construction in characteristic variables (S = I, L = Lambda, A = F).
/// Throws BadPartition when the sign pattern of lambda disagrees with m.
Mode mode_from_characteristic(const Vector& lambda, int m, const Matrix& F, const Matrix& G);

/// Ordered, non-empty set of modes sharing the state dimension.
class SwitchedSystem {
public:
    explicit SwitchedSystem(std::vector<Mode> modes);

    int n() const noexcept { return n_; }
    int size() const noexcept { return static_cast<int>(modes_.size()); }
    const Mode& mode(int i) const { return modes_.at(static_cast<std::size_t>(i)); }
    const std::vector<Mode>& modes() const noexcept { return modes_; }

    bool common_sign_structure() const;
    bool all_one_signed() const;

private:
    std::vector<Mode> modes_;
    int n_ = 0;
};

}  // namespace hyperswitch
