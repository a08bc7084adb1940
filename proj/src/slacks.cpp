#include "hyperswitch/slacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hyperswitch/errors.hpp"

namespace hyperswitch {

namespace {

Matrix block_weights(const Mode& mode, const Matrix& q_minus, const Matrix& q_plus, double w_minus,
                     double w_plus) {
    const int n = mode.n();
    const int m = mode.m();
    if (q_minus.rows() != m || q_minus.cols() != m || q_plus.rows() != n - m || q_plus.cols() != n - m)
        throw DimensionMismatch("weights do not match the sign partition of the mode");
    Matrix w = Matrix::Zero(n, n);
    w.topLeftCorner(m, m) = w_minus * q_minus;
    w.bottomRightCorner(n - m, n - m) = w_plus * q_plus;
    return w;
}

std::pair<Matrix, Matrix> split(const Mode& mode, const Vector& q) {
    if (q.size() != mode.n()) throw DimensionMismatch("weight vector has wrong length");
    const int m = mode.m();
    return {q.head(m).asDiagonal(), q.tail(mode.n() - m).asDiagonal()};
}

// Slack for a fixed weight matrix W standing in for Q(x).
Matrix interior_from_weight(const Mode& mode, double mu, double nu, const Matrix& w) {
    const Matrix lp = mode.lambda_abs().asDiagonal();
    const Matrix& f = mode.F();
    return 2.0 * mu * w * lp - f.transpose() * w - w * f - 2.0 * nu * w;
}

double symmetric_part_gap(const Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace

SymMatrix interior_lmi_slack(const Mode& mode, double mu, double nu, const Matrix& q_minus,
                             const Matrix& q_plus, double x) {
    const Matrix w = block_weights(mode, q_minus, q_plus, std::exp(2.0 * mu * x), std::exp(-2.0 * mu * x));
    return SymMatrix::trusted(interior_from_weight(mode, mu, nu, w));
}

SymMatrix interior_lmi_slack(const Mode& mode, double mu, double nu, const Vector& q, double x) {
    const auto [qm, qp] = split(mode, q);
    return interior_lmi_slack(mode, mu, nu, qm, qp, x);
}

SymMatrix interior_interval_slack(const Mode& mode, double mu, double nu, const Matrix& q_minus,
                                  const Matrix& q_plus, double x0, double x1) {
    // S(x) = e^{2 mu x} A + e^{-2 mu x} B, split by which weight block is active.
    const Matrix a = interior_from_weight(mode, mu, nu, block_weights(mode, q_minus, q_plus * 0.0, 1.0, 1.0));
    const Matrix b = interior_from_weight(mode, mu, nu, block_weights(mode, q_minus * 0.0, q_plus, 1.0, 1.0));
    auto range = [](double c, double lo, double hi) {
        const double u = std::exp(c * lo);
        const double v = std::exp(c * hi);
        return std::pair{std::min(u, v), std::max(u, v)};
    };
    const auto [a_lo, a_hi] = range(2.0 * mu, x0, x1);
    const auto [b_lo, b_hi] = range(-2.0 * mu, x0, x1);
    const Matrix mid = 0.5 * (a_lo + a_hi) * a + 0.5 * (b_lo + b_hi) * b;
    const Matrix rad = 0.5 * (a_hi - a_lo) * a.cwiseAbs() + 0.5 * (b_hi - b_lo) * b.cwiseAbs();
    const Vector row = rad.rowwise().sum();
    return SymMatrix::trusted(mid - Matrix(row.asDiagonal()));
}

SymMatrix boundary_lmi_slack(const Mode& mode, double mu, const Matrix& q_minus, const Matrix& q_plus) {
    const int n = mode.n();
    const int m = mode.m();
    const int p = n - m;
    Matrix b0 = Matrix::Zero(n, n);
    b0.topLeftCorner(m, m).setIdentity();
    b0.bottomLeftCorner(p, m) = mode.G_pm();
    b0.bottomRightCorner(p, p) = mode.G_pp();
    Matrix b1 = Matrix::Zero(n, n);
    b1.topLeftCorner(m, m) = mode.G_mm();
    b1.topRightCorner(m, p) = mode.G_mp();
    b1.bottomRightCorner(p, p).setIdentity();

    const Matrix lam = mode.Lambda();
    const Matrix q0 = block_weights(mode, q_minus, q_plus, 1.0, 1.0);
    const Matrix q1 = block_weights(mode, q_minus, q_plus, std::exp(2.0 * mu), std::exp(-2.0 * mu));
    const Matrix lhs = b0.transpose() * q0 * lam * b0;
    const Matrix rhs = b1.transpose() * q1 * lam * b1;
    return SymMatrix::trusted(rhs - lhs);
}

SymMatrix boundary_lmi_slack(const Mode& mode, double mu, const Vector& q) {
    const auto [qm, qp] = split(mode, q);
    return boundary_lmi_slack(mode, mu, qm, qp);
}

SymMatrix compact_boundary_slack(const Mode& mode, double mu, const Vector& q) {
    const auto [qm, qp] = split(mode, q);
    const Matrix lp = mode.lambda_abs().asDiagonal();
    const Matrix inner = block_weights(mode, qm, qp, std::exp(2.0 * mu), 1.0) * lp;
    const Matrix outer = block_weights(mode, qm, qp, 1.0, std::exp(-2.0 * mu)) * lp;
    return SymMatrix::trusted(outer - mode.G().transpose() * inner * mode.G());
}

bool interior_x_independent(const Mode& mode, double mu) {
    return mu == 0.0 || mode.m() == 0 || mode.m() == mode.n() || mode.has_diagonal_source();
}

XCheckResult check_interior_over_x(const Mode& mode, double mu, double nu, const Matrix& q_minus,
                                   const Matrix& q_plus, const XCheck& x_check, double tol_feas) {
    if (x_check.n_x < 2) throw std::invalid_argument("x check needs at least 2 points");
    XCheckResult r;
    r.worst_margin = std::numeric_limits<double>::infinity();
    if (interior_x_independent(mode, mu)) {
        r.exact = true;
        r.worst_margin = psd_margin(interior_lmi_slack(mode, mu, nu, q_minus, q_plus, 0.0));
        r.worst_x = 0.0;
    } else {
        const int k = x_check.n_x;
        const bool interval = x_check.kind == XCheck::Kind::Interval;
        for (int i = 0; i < (interval ? k - 1 : k); ++i) {
            const double x = static_cast<double>(i) / (k - 1);
            const double margin =
                interval ? psd_margin(interior_interval_slack(mode, mu, nu, q_minus, q_plus, x,
                                                              static_cast<double>(i + 1) / (k - 1)))
                         : psd_margin(interior_lmi_slack(mode, mu, nu, q_minus, q_plus, x));
            if (margin < r.worst_margin) {
                r.worst_margin = margin;
                r.worst_x = x;
            }
        }
    }
    r.ok = r.worst_margin >= -tol_feas;
    return r;
}

XCheckResult check_interior_over_x(const Mode& mode, double mu, double nu, const Vector& q,
                                   const XCheck& x_check, double tol_feas) {
    const auto [qm, qp] = split(mode, q);
    return check_interior_over_x(mode, mu, nu, qm, qp, x_check, tol_feas);
}

bool check_prop21(const Mode& mode, double mu, double nu, const Matrix& q_minus, const Matrix& q_plus,
                  const XCheck& x_check) {
    if (!(nu > 0.0)) throw PreconditionViolated("nu must be positive");
    for (const Matrix* q : {&q_minus, &q_plus}) {
        if (q->size() == 0) continue;
        if (symmetric_part_gap(*q) > 1e-12 * q->cwiseAbs().maxCoeff())
            throw PreconditionViolated("weights must be symmetric");
        if (psd_margin(SymMatrix::trusted(*q)) <= 0.0)
            throw PreconditionViolated("weights must be positive definite");
    }
    const Matrix w = block_weights(mode, q_minus, q_plus, 1.0, 1.0);
    const Matrix lam = mode.Lambda();
    if ((w * lam - lam * w).cwiseAbs().maxCoeff() > kTolFeas)
        throw CommutationViolated("Q(x) must commute with Lambda");

    if (!check_interior_over_x(mode, mu, nu, q_minus, q_plus, x_check).ok) return false;
    return psd_margin(boundary_lmi_slack(mode, mu, q_minus, q_plus)) >= -kTolFeas;
}

bool check_corollary22(const Mode& mode, double mu, const Vector& m_diag) {
    if (mode.m() != 0) throw WrongSignStructure("positive-speed test requires m = 0");
    const int n = mode.n();
    if (m_diag.size() != n) throw DimensionMismatch("M has wrong length");
    const Matrix mm = m_diag.asDiagonal();
    const Matrix a = mode.Lambda().inverse() * mode.F() - mu * Matrix::Identity(n, n);
    const double interior = psd_margin(SymMatrix::trusted(-(a.transpose() * mm + mm * a)));
    const double boundary =
        psd_margin(SymMatrix::trusted(mm - std::exp(2.0 * mu) * mode.G().transpose() * mm * mode.G()));
    const bool ok = interior > 0.0 && boundary >= -kTolFeas;
    if (ok && boundary >= 0.0) {
        const Vector q = m_diag.cwiseQuotient(mode.lambda());
        const double nu = 0.5 * interior / (2.0 * q.maxCoeff());
        if (!check_prop21(mode, mu, nu, Matrix(0, 0), Matrix(q.asDiagonal())))
            throw std::logic_error("positive-speed test disagrees with the single-mode test");
    }
    return ok;
}

}  // namespace hyperswitch
