#pragma once

#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "hyperswitch/densela.hpp"

namespace hyperswitch {

/// Symmetric matrix affine in the decision vector q:
/// constant + sum_j q_j * coeffs[j] (sparse list of (index, matrix)).
struct LmiBlock {
    std::string label;
    Matrix constant;
    std::vector<std::pair<int, Matrix>> coeffs;

    Matrix evaluate(const Vector& q) const;
};

/// Find q with every block PSD, subject to E q = 0 and lower <= q <= upper.
struct LmiProblem {
    int num_vars = 0;
    std::vector<LmiBlock> blocks;
    Matrix equalities;  // rows x num_vars, may be empty
    double lower = 1e-8;
    double upper = 1.0;
};

enum class LmiStatus { Feasible, Infeasible, StructuralInfeasible };

struct LmiSettings {
    double tol_feas = kTolFeas;
    int max_iters = 300;
    double gap_tol = 1e-10;
    /// Stop as soon as the sign of the optimal margin is known.
    bool decide_only = false;
};

struct LmiResult {
    LmiStatus status = LmiStatus::Infeasible;
    Vector q;
    double margin = -std::numeric_limits<double>::infinity();  // best min_k lambda_min(block_k)
    double upper_bound = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

/// Maximizes t subject to block_k(q) >= t I for all k with a Kelley cutting
/// plane: each violated block contributes the supporting cut v^T block_k(q) v >= t
/// from its minimum eigenvector v. Equalities are eliminated through an
/// orthonormal null-space basis. When every block is homogeneous in q the
/// scale is fixed by sum(q) >= 1. Feasible iff the best margin >= -tol_feas.
LmiResult solve_lmi(const LmiProblem& problem, const LmiSettings& settings = {});

}  // namespace hyperswitch
