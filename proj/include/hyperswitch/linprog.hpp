#pragma once

#include <vector>

#include "hyperswitch/densela.hpp"

namespace hyperswitch {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

/// Dense LP  max c^T x  s.t.  a_j^T x <= b_j,  x free.
///
/// Solved through its dual  min b^T y  s.t.  sum_j y_j a_j = c,  y >= 0  with a
/// revised primal simplex. The dual has only dim(x) rows, and appending a
/// primal constraint appends a dual column, so after the first solve every
/// later solve restarts from the previous optimal basis. This is the access
/// pattern of a cutting-plane loop.
class CutLp {
public:
    explicit CutLp(Vector objective);

    Eigen::Index dim() const noexcept { return c_.size(); }
    std::size_t num_constraints() const noexcept { return real_cols_; }

    void add_constraint(const Vector& a, double b);

    LpStatus solve(int max_pivots = 20000);

    /// Primal optimum x (the simplex multipliers of the dual).
    const Vector& solution() const noexcept { return x_; }
    double objective() const noexcept { return objective_; }

private:
    struct Column {
        Vector a;
        double cost;
        bool artificial;
    };

    LpStatus run_phase(bool phase_one, int& pivots_left);
    void refactor();
    void drive_out_artificials();

    Vector c_;
    std::vector<Column> cols_;
    std::vector<std::size_t> basis_;
    std::vector<char> in_basis_;
    std::size_t real_cols_ = 0;
    bool phase_one_done_ = false;

    Eigen::PartialPivLU<Matrix> lu_;
    Vector y_basic_;
    Vector x_;
    double objective_ = 0.0;
};

}  // namespace hyperswitch
