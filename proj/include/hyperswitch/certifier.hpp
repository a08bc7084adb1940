#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hyperswitch/core_model.hpp"
#include "hyperswitch/densela.hpp"
#include "hyperswitch/lmi_solver.hpp"
#include "hyperswitch/slacks.hpp"

namespace hyperswitch {

enum class Variant {
    UnswitchedProp21,  // single mode, weighted interior + bordered boundary
    CommonSignFixed,   // common Lyapunov function, equal m_i
    DwellSignFixed,    // multiple Lyapunov functions, equal m_i
    CommonSignFree,    // common Lyapunov function, mode-dependent m_i, mu = 0
    DwellSignFree,     // multiple Lyapunov functions, mode-dependent m_i
    MuZero,            // mu = 0 restriction of CommonSignFixed
    DiagonalSource,    // diagonal F_i: interior reduces to -mu Lambda+ + F <= -nu I
    OneSigned,         // all m_i = 0 or all m_i = n
};

std::string to_string(Variant v);
/// Accepts the enumerator names, case-insensitively. Throws ParseError.
Variant variant_from_string(const std::string& name);
bool is_dwell_variant(Variant v);
/// Variants with one mu shared by all modes (as opposed to per-mode mu_i).
bool has_shared_mu(Variant v);

inline constexpr double kQFloor = 1e-8;

struct SearchOptions {
    std::vector<double> mu_grid = default_mu_grid();
    double nu_lo = 0.0;
    std::optional<double> nu_hi;  // auto: max ||F_i|| + |mu| max |lambda| + 1
    int nu_iters = 40;
    /// Smallest rate counted as a certificate.
    double nu_min = 1e-6;
    XCheck x_check = XCheck::grid();
    double tol_feas = kTolFeas;
    int max_feas_iters = 300;

    /// Zoom the mu search around the best grid point down to mu_tol.
    bool refine_mu = true;
    double mu_tol = 1e-6;

    /// Dwell variants: force a fixed gamma (>= 1) instead of minimizing it.
    std::optional<double> gamma;
    /// Dwell variants: search a single mu shared by every mode.
    bool shared_mu = false;
    /// Skip the mu search and use these values (one per mode, or one shared).
    std::optional<std::vector<double>> fixed_mu;

    int jobs = 1;

    static std::vector<double> default_mu_grid(int points = 41, double lo = -3.0, double hi = 3.0);
};

struct Margin {
    std::string label;
    double value = 0.0;
};

struct Certificate {
    Variant variant = Variant::CommonSignFixed;
    std::vector<Vector> Q;    // diagonal entries per mode
    std::vector<double> mu;   // per mode; equal entries for shared-mu variants
    double nu = 0.0;
    double gamma = 1.0;
    double tau_D = 0.0;
    std::vector<Margin> margins;
};

enum class FeasStatus { Feasible, Infeasible, StructuralInfeasible };

struct FeasibilityResult {
    FeasStatus status = FeasStatus::Infeasible;
    std::vector<Vector> Q;
    double margin = 0.0;  // best min lambda_min over all constraints
};

/// For fixed mu (per mode) and nu, searches the diagonal weights of every
/// mode. For dwell variants gamma enters the pairwise comparisons; gamma = 1
/// turns them into equalities.
FeasibilityResult feasibility_fixed(const SwitchedSystem& sys, Variant variant, const std::vector<double>& mu,
                                    double nu, const SearchOptions& options = {}, double gamma = 1.0,
                                    bool decide_only = false);

struct CertifyResult {
    bool feasible = false;
    std::optional<Certificate> certificate;
    double best_margin = 0.0;  // margin at nu_min for the best mu when infeasible
    std::vector<double> best_mu;
};

/// Line search over mu (or mu_i), bisection over nu, cutting-plane LMI
/// feasibility over the weights. Common variants maximize nu, dwell variants
/// minimize tau_D. Throws VariantPreconditionViolated or KernelMismatch.
CertifyResult certify(const SwitchedSystem& sys, Variant variant, const SearchOptions& options = {});

/// Smallest pairwise gamma (floored at 1) for the weights of a dwell variant.
double certificate_gamma(const SwitchedSystem& sys, Variant variant, const std::vector<Vector>& Q);

/// tau_D from the variant formula; 0 for common variants.
double dwell_time_bound(const Certificate& cert);
double dwell_time_bound(Variant variant, double gamma, double nu, const std::vector<double>& mu);

/// Largest nu for which fixed weights Q and fixed mu satisfy every
/// constraint of the variant (gamma recomputed from Q). Returns 0 when none.
double max_nu_for_weights(const SwitchedSystem& sys, Variant variant, const std::vector<Vector>& Q,
                          const std::vector<double>& mu, const SearchOptions& options = {});

/// Builds a certificate from given weights: gamma from certificate_gamma,
/// tau_D from the variant formula, margins from check_certificate.
Certificate make_certificate(const SwitchedSystem& sys, Variant variant, std::vector<Vector> Q,
                             std::vector<double> mu, double nu, const SearchOptions& options = {});

struct AuditReport {
    bool passed = false;
    std::vector<Margin> entries;
    std::vector<std::string> failures;
    double gamma_recomputed = 1.0;
    double tau_D_recomputed = 0.0;
    bool x_grid_caveat = false;  // interior checked on a grid only
};

/// Re-verifies every inequality of the certificate's variant independently.
AuditReport check_certificate(const SwitchedSystem& sys, const Certificate& cert,
                              const SearchOptions& options = {});

}  // namespace hyperswitch
