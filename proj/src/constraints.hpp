#pragma once

#include <vector>

#include "hyperswitch/certifier.hpp"

namespace hyperswitch::detail {

/// Throws VariantPreconditionViolated (or KernelMismatch) when the system
/// does not have the structure the variant requires.
void require_variant_structure(const SwitchedSystem& sys, Variant variant);

/// Expands a shared mu to one entry per mode and validates the length.
std::vector<double> expand_mu(const SwitchedSystem& sys, const std::vector<double>& mu);

/// M-/M+ weights (S-)^T Q- S- and (S+)^T Q+ S+ of one mode.
Matrix weight_minus(const Mode& mode, const Vector& q);
Matrix weight_plus(const Mode& mode, const Vector& q);
/// Full weight S^T Q S.
Matrix weight_full(const Mode& mode, const Vector& q);

/// All constraints of the variant at fixed mu (per mode), nu and gamma, as
/// blocks affine in the stacked weights q (index mode * n + k).
LmiProblem build_problem(const SwitchedSystem& sys, Variant variant, const std::vector<double>& mu, double nu,
                         double gamma, const XCheck& x_check);

/// Per-mode constraints only (no coupling), for the single mode i.
LmiProblem build_single_mode_problem(const SwitchedSystem& sys, Variant variant, int mode, double mu,
                                     double nu, const XCheck& x_check);

std::vector<Vector> split_weights(const SwitchedSystem& sys, const Vector& q);
Vector stack_weights(const std::vector<Vector>& q);

}  // namespace hyperswitch::detail
