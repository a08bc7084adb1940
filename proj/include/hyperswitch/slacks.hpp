#pragma once

// Slack matrices (right-hand side minus left-hand side) of the single-mode
// matrix inequalities. An inequality holds iff psd_margin(slack) >= -kTolFeas.
// Weights are diagonal vectors q partitioned at m into (q-, q+), or full
// blocks (Q-, Q+) that commute with Lambda.

#include "hyperswitch/core_model.hpp"
#include "hyperswitch/densela.hpp"

namespace hyperswitch {

/// How the "for all x in [0,1]" quantifier is checked.
struct XCheck {
    enum class Kind { Grid, Interval };
    Kind kind = Kind::Grid;
    int n_x = 65;  // grid points (Grid) or cell endpoints (Interval)

    static XCheck grid(int n_x = 65) { return {Kind::Grid, n_x}; }
    static XCheck interval(int n_x = 65) { return {Kind::Interval, n_x}; }
};

/// 2 mu Q(x) Lambda+ - F^T Q(x) - Q(x) F - 2 nu Q(x), Q(x) = diag(e^{2 mu x} Q-, e^{-2 mu x} Q+).
SymMatrix interior_lmi_slack(const Mode& mode, double mu, double nu, const Vector& q, double x);
SymMatrix interior_lmi_slack(const Mode& mode, double mu, double nu, const Matrix& q_minus,
                             const Matrix& q_plus, double x);

/// Sound lower bound of the interior slack over the cell [x0, x1]: the
/// entrywise midpoint minus diag(row sums of the entrywise radius).
SymMatrix interior_interval_slack(const Mode& mode, double mu, double nu, const Matrix& q_minus,
                                  const Matrix& q_plus, double x0, double x1);

/// Bordered boundary inequality evaluated with Q(0) and Q(1).
SymMatrix boundary_lmi_slack(const Mode& mode, double mu, const Vector& q);
SymMatrix boundary_lmi_slack(const Mode& mode, double mu, const Matrix& q_minus, const Matrix& q_plus);

/// diag(Q- Lambda+, e^{-2mu} Q+ Lambda+) - G^T diag(e^{2mu} Q- Lambda+, Q+ Lambda+) G.
/// Congruent to the bordered form; at mu = 0 it reads Q Lambda+ - G^T Q Lambda+ G.
SymMatrix compact_boundary_slack(const Mode& mode, double mu, const Vector& q);

/// True when the sign of the interior slack cannot change with x, so x = 0 decides:
/// mu = 0, diagonal F, or one-signed speeds (m = 0 or m = n).
bool interior_x_independent(const Mode& mode, double mu);

struct XCheckResult {
    bool ok = false;
    double worst_margin = 0.0;
    double worst_x = 0.0;  // left end of the worst cell in Interval mode
    bool exact = false;    // decided at a single point
};

XCheckResult check_interior_over_x(const Mode& mode, double mu, double nu, const Vector& q,
                                   const XCheck& x_check, double tol_feas = kTolFeas);
XCheckResult check_interior_over_x(const Mode& mode, double mu, double nu, const Matrix& q_minus,
                                   const Matrix& q_plus, const XCheck& x_check,
                                   double tol_feas = kTolFeas);

/// Single-mode test: interior inequality over x and bordered boundary inequality.
/// Throws PreconditionViolated for nu <= 0 or non-SPD weights and
/// CommutationViolated when Q(x) does not commute with Lambda.
bool check_prop21(const Mode& mode, double mu, double nu, const Matrix& q_minus, const Matrix& q_plus,
                  const XCheck& x_check = {});

/// Positive-speed test on M (diagonal entries):
/// (Lambda^-1 F - mu I)^T M + M (Lambda^-1 F - mu I) < 0 and e^{2mu} G^T M G <= M.
/// A positive answer is cross-checked against check_prop21 with Q = M Lambda^-1.
/// Throws WrongSignStructure when m != 0.
bool check_corollary22(const Mode& mode, double mu, const Vector& m_diag);

}  // namespace hyperswitch
