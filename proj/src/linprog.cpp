#include "hyperswitch/linprog.hpp"

#include <cmath>
#include <limits>

namespace hyperswitch {

namespace {
constexpr double kReducedCostTol = 1e-11;
constexpr double kPivotTol = 1e-11;
constexpr int kDegenerateBeforeBland = 40;
}  // namespace

CutLp::CutLp(Vector objective) : c_(std::move(objective)) {
    const Eigen::Index d = c_.size();
    for (Eigen::Index r = 0; r < d; ++r) {
        Vector a = Vector::Zero(d);
        a(r) = c_(r) < 0.0 ? -1.0 : 1.0;
        cols_.push_back({a, 0.0, true});
        basis_.push_back(cols_.size() - 1);
        in_basis_.push_back(1);
    }
    x_ = Vector::Zero(d);
}

void CutLp::add_constraint(const Vector& a, double b) {
    cols_.push_back({a, b, false});
    in_basis_.push_back(0);
    ++real_cols_;
}

void CutLp::refactor() {
    const Eigen::Index d = dim();
    Matrix bm(d, d);
    for (Eigen::Index k = 0; k < d; ++k) bm.col(k) = cols_[basis_[static_cast<std::size_t>(k)]].a;
    lu_.compute(bm);
    y_basic_ = lu_.solve(c_);
}

LpStatus CutLp::run_phase(bool phase_one, int& pivots_left) {
    const Eigen::Index d = dim();
    int degenerate = 0;
    while (true) {
        if (pivots_left-- <= 0) return LpStatus::IterationLimit;
        refactor();

        Vector cost_b(d);
        for (Eigen::Index k = 0; k < d; ++k) {
            const Column& col = cols_[basis_[static_cast<std::size_t>(k)]];
            cost_b(k) = phase_one ? (col.artificial ? 1.0 : 0.0) : (col.artificial ? 0.0 : col.cost);
        }
        const Vector pi = lu_.transpose().solve(cost_b);

        const bool bland = degenerate > kDegenerateBeforeBland;
        std::size_t entering = cols_.size();
        double best = -kReducedCostTol;
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            if (in_basis_[j]) continue;
            const Column& col = cols_[j];
            if (col.artificial) continue;
            const double cost = phase_one ? 0.0 : col.cost;
            const double scale = 1.0 + std::abs(cost);
            const double rc = cost - pi.dot(col.a);
            if (rc < best * scale) {
                entering = j;
                if (bland) break;
                best = rc / scale;
            }
        }
        if (entering == cols_.size()) {
            x_ = pi;
            return LpStatus::Optimal;
        }

        const Vector dir = lu_.solve(cols_[entering].a);
        Eigen::Index leave = -1;
        double ratio = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < d; ++k) {
            if (dir(k) <= kPivotTol) continue;
            const double r = std::max(y_basic_(k), 0.0) / dir(k);
            if (r < ratio - 1e-15 ||
                (r <= ratio + 1e-15 && leave >= 0 &&
                 basis_[static_cast<std::size_t>(k)] < basis_[static_cast<std::size_t>(leave)])) {
                ratio = r;
                leave = k;
            }
        }
        if (leave < 0) return LpStatus::Unbounded;  // of the dual objective

        degenerate = ratio <= 1e-14 ? degenerate + 1 : 0;
        in_basis_[basis_[static_cast<std::size_t>(leave)]] = 0;
        basis_[static_cast<std::size_t>(leave)] = entering;
        in_basis_[entering] = 1;
    }
}

void CutLp::drive_out_artificials() {
    const Eigen::Index d = dim();
    for (Eigen::Index k = 0; k < d; ++k) {
        if (!cols_[basis_[static_cast<std::size_t>(k)]].artificial) continue;
        refactor();
        Vector unit = Vector::Zero(d);
        unit(k) = 1.0;
        const Vector row = lu_.transpose().solve(unit);  // row k of B^-1
        for (std::size_t j = 0; j < cols_.size(); ++j) {
            if (in_basis_[j] || cols_[j].artificial) continue;
            if (std::abs(row.dot(cols_[j].a)) > 1e-9) {
                in_basis_[basis_[static_cast<std::size_t>(k)]] = 0;
                basis_[static_cast<std::size_t>(k)] = j;
                in_basis_[j] = 1;
                break;
            }
        }
    }
}

LpStatus CutLp::solve(int max_pivots) {
    int pivots_left = max_pivots;
    if (!phase_one_done_) {
        const LpStatus s = run_phase(true, pivots_left);
        if (s == LpStatus::IterationLimit) return s;
        double infeas = 0.0;
        for (Eigen::Index k = 0; k < dim(); ++k)
            if (cols_[basis_[static_cast<std::size_t>(k)]].artificial) infeas += std::max(y_basic_(k), 0.0);
        // An infeasible dual means the primal is unbounded (or infeasible);
        // callers always add bounding constraints first.
        if (infeas > 1e-9 * (1.0 + c_.cwiseAbs().sum())) return LpStatus::Unbounded;
        drive_out_artificials();
        phase_one_done_ = true;
    }
    const LpStatus s = run_phase(false, pivots_left);
    if (s == LpStatus::Unbounded) return LpStatus::Infeasible;
    if (s == LpStatus::Optimal) objective_ = c_.dot(x_);
    return s;
}

}  // namespace hyperswitch
