#include "hyperswitch/lmi_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hyperswitch/errors.hpp"
#include "hyperswitch/linprog.hpp"

namespace hyperswitch {

Matrix LmiBlock::evaluate(const Vector& q) const {
    Matrix m = constant;
    for (const auto& [j, a] : coeffs) m += q(j) * a;
    return m;
}

namespace {

struct ReducedBlock {
    Matrix constant;
    std::vector<Matrix> coeffs;  // one per reduced variable

    Matrix evaluate(const Vector& z) const {
        Matrix m = constant;
        for (std::size_t r = 0; r < coeffs.size(); ++r)
            if (z(static_cast<Eigen::Index>(r)) != 0.0) m += z(static_cast<Eigen::Index>(r)) * coeffs[r];
        return m;
    }
};

}  // namespace

LmiResult solve_lmi(const LmiProblem& problem, const LmiSettings& settings) {
    const int nq = problem.num_vars;
    LmiResult result;

    Matrix basis = problem.equalities.rows() > 0 ? null_space_basis(problem.equalities)
                                                 : Matrix(Matrix::Identity(nq, nq));
    basis = basis.unaryExpr([](double v) { return std::abs(v) < 1e-14 ? 0.0 : v; });
    const auto d = static_cast<int>(basis.cols());
    if (d == 0 && nq > 0) {
        result.status = LmiStatus::StructuralInfeasible;
        return result;
    }

    std::vector<ReducedBlock> blocks;
    blocks.reserve(problem.blocks.size());
    for (const LmiBlock& b : problem.blocks) {
        ReducedBlock rb{b.constant, std::vector<Matrix>(static_cast<std::size_t>(d),
                                                        Matrix::Zero(b.constant.rows(), b.constant.cols()))};
        for (const auto& [j, a] : b.coeffs)
            for (int r = 0; r < d; ++r)
                if (basis(j, r) != 0.0) rb.coeffs[static_cast<std::size_t>(r)] += basis(j, r) * a;
        blocks.push_back(std::move(rb));
    }

    // LP in x = (z, t): maximize t.
    Vector objective = Vector::Zero(d + 1);
    objective(d) = 1.0;
    CutLp lp(objective);
    for (int j = 0; j < nq; ++j) {
        Vector a = Vector::Zero(d + 1);
        a.head(d) = basis.row(j).transpose();
        lp.add_constraint(a, problem.upper);
        lp.add_constraint(-a, -problem.lower);
    }
    // Homogeneous blocks: fix the scale of q.
    const bool homogeneous = std::all_of(problem.blocks.begin(), problem.blocks.end(),
                                         [](const LmiBlock& b) { return b.constant.cwiseAbs().maxCoeff() == 0.0; });
    if (homogeneous && nq > 0) {
        Vector a = Vector::Zero(d + 1);
        a.head(d) = -basis.colwise().sum().transpose();
        lp.add_constraint(a, -std::min(1.0, nq * problem.upper));
    }
    auto add_cut = [&](const ReducedBlock& b, const Vector& v) {
        Vector a(d + 1);
        for (int r = 0; r < d; ++r) a(r) = -v.dot(b.coeffs[static_cast<std::size_t>(r)] * v);
        a(d) = 1.0;
        lp.add_constraint(a, v.dot(b.constant * v));
    };
    for (const ReducedBlock& b : blocks) {
        for (Eigen::Index p = 0; p < b.constant.rows(); ++p) {
            Vector e = Vector::Zero(b.constant.rows());
            e(p) = 1.0;
            add_cut(b, e);
        }
    }
    if (blocks.empty()) {
        // Only the box remains: any feasible point has unbounded margin.
        Vector a = Vector::Zero(d + 1);
        a(d) = 1.0;
        lp.add_constraint(a, 1.0);
    }

    Vector best_z = Vector::Zero(d);
    double best = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < settings.max_iters; ++it) {
        result.iterations = it + 1;
        const LpStatus st = lp.solve();
        if (st == LpStatus::Infeasible) {
            result.status = LmiStatus::StructuralInfeasible;
            return result;
        }
        if (st != LpStatus::Optimal) break;
        const Vector& x = lp.solution();
        const Vector z = x.head(d);
        const double t_ub = x(d);
        result.upper_bound = t_ub;

        double f = std::numeric_limits<double>::infinity();
        std::vector<std::pair<std::size_t, Vector>> cuts;
        for (std::size_t k = 0; k < blocks.size(); ++k) {
            auto [lam, v] = min_eigenpair(SymMatrix::trusted(blocks[k].evaluate(z)));
            f = std::min(f, lam);
            if (lam < t_ub - 1e-13 * (1.0 + std::abs(t_ub))) cuts.emplace_back(k, std::move(v));
        }
        if (blocks.empty()) f = t_ub;
        if (f > best) {
            best = f;
            best_z = z;
        }
        if (settings.decide_only && (best >= -settings.tol_feas || t_ub < -settings.tol_feas)) break;
        if (t_ub - best <= settings.gap_tol || cuts.empty()) break;
        for (const auto& [k, v] : cuts) add_cut(blocks[k], v);
    }

    result.q = basis * best_z;
    result.q = result.q.cwiseMax(problem.lower).cwiseMin(problem.upper);
    // Clamping can only move q by rounding noise; re-evaluate on the clamped point.
    double margin = std::numeric_limits<double>::infinity();
    for (const LmiBlock& b : problem.blocks)
        margin = std::min(margin, psd_margin(SymMatrix::trusted(b.evaluate(result.q))));
    if (problem.blocks.empty()) margin = std::numeric_limits<double>::infinity();
    result.margin = margin;
    result.status = margin >= -settings.tol_feas ? LmiStatus::Feasible : LmiStatus::Infeasible;
    return result;
}

}  // namespace hyperswitch
