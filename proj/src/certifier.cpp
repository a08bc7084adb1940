#include "hyperswitch/certifier.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <utility>

#include "constraints.hpp"
#include "hyperswitch/errors.hpp"

namespace hyperswitch {

namespace {

constexpr std::array<std::pair<Variant, const char*>, 8> kNames{{
    {Variant::UnswitchedProp21, "UnswitchedProp21"},
    {Variant::CommonSignFixed, "CommonSignFixed"},
    {Variant::DwellSignFixed, "DwellSignFixed"},
    {Variant::CommonSignFree, "CommonSignFree"},
    {Variant::DwellSignFree, "DwellSignFree"},
    {Variant::MuZero, "MuZero"},
    {Variant::DiagonalSource, "DiagonalSource"},
    {Variant::OneSigned, "OneSigned"},
}};

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

std::string to_string(Variant v) {
    for (const auto& [var, name] : kNames)
        if (var == v) return name;
    return "unknown";
}

Variant variant_from_string(const std::string& name) {
    for (const auto& [var, n] : kNames)
        if (lower(n) == lower(name)) return var;
    throw ParseError("unknown variant '" + name + "'");
}

bool is_dwell_variant(Variant v) { return v == Variant::DwellSignFixed || v == Variant::DwellSignFree; }

bool has_shared_mu(Variant v) { return !is_dwell_variant(v); }

std::vector<double> SearchOptions::default_mu_grid(int points, double lo, double hi) {
    std::vector<double> g;
    if (points == 1) return {0.5 * (lo + hi)};
    for (int k = 0; k < points; ++k) g.push_back(lo + (hi - lo) * k / (points - 1));
    return g;
}

double certificate_gamma(const SwitchedSystem& sys, Variant variant, const std::vector<Vector>& Q) {
    if (!is_dwell_variant(variant) || sys.size() == 1) return 1.0;
    double gamma = 1.0;
    for (int i = 0; i < sys.size(); ++i) {
        for (int j = 0; j < sys.size(); ++j) {
            if (i == j) continue;
            const Mode& mi = sys.mode(i);
            const Mode& mj = sys.mode(j);
            const Vector& qi = Q[static_cast<std::size_t>(i)];
            const Vector& qj = Q[static_cast<std::size_t>(j)];
            if (variant == Variant::DwellSignFixed) {
                if (mi.m() > 0)
                    gamma = std::max(gamma, min_gamma(SymMatrix::trusted(detail::weight_minus(mi, qi)),
                                                      SymMatrix::trusted(detail::weight_minus(mj, qj))));
                if (mi.m() < mi.n())
                    gamma = std::max(gamma, min_gamma(SymMatrix::trusted(detail::weight_plus(mi, qi)),
                                                      SymMatrix::trusted(detail::weight_plus(mj, qj))));
            } else {
                gamma = std::max(gamma, min_gamma(SymMatrix::trusted(detail::weight_full(mi, qi)),
                                                  SymMatrix::trusted(detail::weight_full(mj, qj))));
            }
        }
    }
    return gamma;
}

double dwell_time_bound(Variant variant, double gamma, double nu, const std::vector<double>& mu) {
    if (!is_dwell_variant(variant)) return 0.0;
    const double jump = std::log(std::max(gamma, 1.0)) / (2.0 * nu);
    if (variant == Variant::DwellSignFixed) {
        const auto [lo, hi] = std::minmax_element(mu.begin(), mu.end());
        return jump + (*hi - *lo) / nu;
    }
    double bar = 0.0;
    if (mu.size() == 1) {
        bar = 2.0 * std::abs(mu.front());
    } else {
        for (std::size_t i = 0; i < mu.size(); ++i)
            for (std::size_t j = 0; j < mu.size(); ++j)
                if (i != j) bar = std::max(bar, 2.0 * (std::abs(mu[i]) + std::abs(mu[j])));
    }
    // Jump factor gamma * exp(bar) at a switch.
    return jump + bar / (2.0 * nu);
}

double dwell_time_bound(const Certificate& cert) {
    return dwell_time_bound(cert.variant, cert.gamma, cert.nu, cert.mu);
}

namespace {

bool weights_satisfy(const SwitchedSystem& sys, Variant variant, const Vector& q, const std::vector<double>& mu,
                     double nu, double gamma, const SearchOptions& options) {
    const LmiProblem p = detail::build_problem(sys, variant, mu, nu, gamma, options.x_check);
    for (const LmiBlock& b : p.blocks)
        if (psd_margin(SymMatrix::trusted(b.evaluate(q))) < -options.tol_feas) return false;
    if (p.equalities.rows() > 0) {
        const double scale = std::max(1.0, p.equalities.cwiseAbs().maxCoeff() * q.cwiseAbs().maxCoeff());
        if ((p.equalities * q).cwiseAbs().maxCoeff() > 1e-9 * scale) return false;
    }
    return true;
}

}  // namespace

double max_nu_for_weights(const SwitchedSystem& sys, Variant variant, const std::vector<Vector>& Q,
                          const std::vector<double>& mu_in, const SearchOptions& options) {
    detail::require_variant_structure(sys, variant);
    const std::vector<double> mu = detail::expand_mu(sys, mu_in);
    const Vector q = detail::stack_weights(Q);
    const double gamma = certificate_gamma(sys, variant, Q);
    double hi = 1.0;
    double mu_abs = 0.0;
    double speed = 0.0;
    for (int i = 0; i < sys.size(); ++i) {
        hi = std::max(hi, sys.mode(i).F().norm() + 1.0);
        mu_abs = std::max(mu_abs, std::abs(mu[static_cast<std::size_t>(i)]));
        speed = std::max(speed, sys.mode(i).max_speed());
    }
    hi += mu_abs * speed;
    double lo = 0.0;
    if (!weights_satisfy(sys, variant, q, mu, options.nu_min, gamma, options)) return 0.0;
    lo = options.nu_min;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (weights_satisfy(sys, variant, q, mu, mid, gamma, options) ? lo : hi) = mid;
    }
    return lo;
}

Certificate make_certificate(const SwitchedSystem& sys, Variant variant, std::vector<Vector> Q, std::vector<double> mu,
                             double nu, const SearchOptions& options) {
    Certificate cert;
    cert.variant = variant;
    cert.Q = std::move(Q);
    cert.mu = detail::expand_mu(sys, mu);
    cert.nu = nu;
    cert.gamma = certificate_gamma(sys, variant, cert.Q);
    cert.tau_D = dwell_time_bound(cert);
    cert.margins = check_certificate(sys, cert, options).entries;
    return cert;
}

}  // namespace hyperswitch
