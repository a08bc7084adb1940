#include <algorithm>
#include <cmath>
#include <string>

#include "constraints.hpp"
#include "hyperswitch/certifier.hpp"
#include "hyperswitch/errors.hpp"

namespace hyperswitch {

namespace {

bool interior_is_weighted(Variant v) {
    return v == Variant::UnswitchedProp21 || v == Variant::CommonSignFixed || v == Variant::DwellSignFixed ||
           v == Variant::DwellSignFree;
}

bool rel_close(double a, double b, double rel) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

AuditReport check_certificate(const SwitchedSystem& sys, const Certificate& cert, const SearchOptions& options) {
    AuditReport rep;
    // Tolerance relative to the largest weight (capped at the absolute one).
    double q_max = 0.0;
    for (const Vector& q : cert.Q)
        if (q.size() > 0) q_max = std::max(q_max, q.cwiseAbs().maxCoeff());
    const double tol = options.tol_feas * std::min(1.0, q_max);
    auto fail = [&](std::string msg) { rep.failures.push_back(std::move(msg)); };
    auto record = [&](std::string label, double margin) {
        if (margin < -tol) fail(label + " violated (margin " + std::to_string(margin) + ")");
        rep.entries.push_back({std::move(label), margin});
    };

    const int n = sys.n();
    const int modes = sys.size();
    if (static_cast<int>(cert.Q.size()) != modes || static_cast<int>(cert.mu.size()) != modes) {
        fail("certificate does not match the number of modes");
        return rep;
    }
    for (int i = 0; i < modes; ++i) {
        const Vector& q = cert.Q[static_cast<std::size_t>(i)];
        if (q.size() != n) {
            fail("Q of mode " + std::to_string(i) + " has wrong length");
            return rep;
        }
        if (!(q.minCoeff() >= kQFloor * (1.0 - 1e-12)) || !q.allFinite())
            fail("Q of mode " + std::to_string(i) + " has an entry below the floor " + std::to_string(kQFloor));
    }
    if (!(cert.nu > 0.0)) fail("nu must be positive");
    if (!(cert.gamma >= 1.0)) fail("gamma must be at least 1");
    try {
        detail::require_variant_structure(sys, cert.variant);
    } catch (const Error& e) {
        fail(e.what());
        return rep;
    }
    if (has_shared_mu(cert.variant)) {
        for (double m : cert.mu)
            if (m != cert.mu.front()) fail("variant needs a single mu shared by all modes");
    }
    if ((cert.variant == Variant::MuZero || cert.variant == Variant::CommonSignFree) &&
        std::any_of(cert.mu.begin(), cert.mu.end(), [](double m) { return m != 0.0; }))
        fail("variant needs mu = 0");
    if (!rep.failures.empty()) return rep;

    const Variant v = cert.variant;
    for (int i = 0; i < modes; ++i) {
        const Mode& md = sys.mode(i);
        const Vector& q = cert.Q[static_cast<std::size_t>(i)];
        const double mu = cert.mu[static_cast<std::size_t>(i)];
        const double nu = cert.nu;
        const std::string tag = "mode " + std::to_string(i) + " ";
        const Matrix qq = q.asDiagonal();
        const Matrix lp = md.lambda_abs().asDiagonal();
        const Matrix& f = md.F();
        const Matrix id = Matrix::Identity(n, n);

        if (interior_is_weighted(v)) {
            const XCheckResult xr = check_interior_over_x(md, mu, nu, q, options.x_check, tol);
            if (!xr.exact && options.x_check.kind == XCheck::Kind::Grid) rep.x_grid_caveat = true;
            record(tag + "interior (worst x=" + std::to_string(xr.worst_x) + ")", xr.worst_margin);
        } else if (v == Variant::CommonSignFree) {
            record(tag + "interior", psd_margin(SymMatrix::trusted(-f.transpose() * qq - qq * f - 2.0 * nu * qq)));
        } else if (v == Variant::MuZero) {
            record(tag + "interior", psd_margin(SymMatrix::trusted(-f.transpose() * qq - qq * f - 2.0 * nu * id)));
        } else if (v == Variant::DiagonalSource) {
            record(tag + "interior", (mu * md.lambda_abs() - f.diagonal()).minCoeff() - nu);
        } else if (v == Variant::OneSigned) {
            record(tag + "interior",
                   psd_margin(SymMatrix::trusted(2.0 * mu * qq * lp - f.transpose() * qq - qq * f - 2.0 * nu * id)));
        }
        if (v == Variant::MuZero || v == Variant::OneSigned) record(tag + "Q <= I", 1.0 - q.maxCoeff());

        if (v == Variant::CommonSignFree) {
            record(tag + "boundary", psd_margin(compact_boundary_slack(md, 0.0, q)));
        } else if (v == Variant::OneSigned) {
            const Matrix ql = qq * lp;
            record(tag + "boundary",
                   psd_margin(SymMatrix::trusted(std::exp(-2.0 * mu) * ql - md.G().transpose() * ql * md.G())));
        } else {
            record(tag + "boundary", psd_margin(boundary_lmi_slack(md, mu, q)));
        }
    }

    // Coupling between modes.
    if (modes > 1) {
        if (is_dwell_variant(v)) {
            for (int i = 0; i < modes; ++i) {
                for (int j = 0; j < modes; ++j) {
                    if (i == j) continue;
                    const Mode& mi = sys.mode(i);
                    const Mode& mj = sys.mode(j);
                    const Vector& qi = cert.Q[static_cast<std::size_t>(i)];
                    const Vector& qj = cert.Q[static_cast<std::size_t>(j)];
                    const std::string tag = "pair " + std::to_string(i) + "<=" + std::to_string(j);
                    if (v == Variant::DwellSignFixed) {
                        const Matrix dm = cert.gamma * detail::weight_minus(mj, qj) - detail::weight_minus(mi, qi);
                        const Matrix dp = cert.gamma * detail::weight_plus(mj, qj) - detail::weight_plus(mi, qi);
                        record(tag + " minus", psd_margin(SymMatrix::trusted(dm)));
                        record(tag + " plus", psd_margin(SymMatrix::trusted(dp)));
                    } else {
                        const Matrix d = cert.gamma * detail::weight_full(mj, qj) - detail::weight_full(mi, qi);
                        record(tag, psd_margin(SymMatrix::trusted(d)));
                    }
                }
            }
        } else {
            const bool split = v != Variant::CommonSignFree;
            for (int i = 0; i + 1 < modes; ++i) {
                const Mode& a = sys.mode(i);
                const Mode& b = sys.mode(i + 1);
                const Vector& qa = cert.Q[static_cast<std::size_t>(i)];
                const Vector& qb = cert.Q[static_cast<std::size_t>(i + 1)];
                auto residual = [](const Matrix& x, const Matrix& y) {
                    const double scale = std::max({1.0, x.cwiseAbs().maxCoeff(), y.cwiseAbs().maxCoeff()});
                    return (x - y).cwiseAbs().maxCoeff() / scale;
                };
                const std::string tag = "equality " + std::to_string(i) + "=" + std::to_string(i + 1);
                if (split) {
                    record(tag + " minus", -residual(detail::weight_minus(a, qa), detail::weight_minus(b, qb)));
                    record(tag + " plus", -residual(detail::weight_plus(a, qa), detail::weight_plus(b, qb)));
                } else {
                    record(tag, -residual(detail::weight_full(a, qa), detail::weight_full(b, qb)));
                }
            }
        }
    }

    try {
        rep.gamma_recomputed = certificate_gamma(sys, v, cert.Q);
    } catch (const KernelMismatch& e) {
        fail(std::string("no finite gamma: ") + e.what());
        return rep;
    }
    if (!rel_close(rep.gamma_recomputed, cert.gamma, 1e-9))
        fail("gamma does not recompute: " + std::to_string(rep.gamma_recomputed) + " vs " + std::to_string(cert.gamma));
    rep.tau_D_recomputed = dwell_time_bound(v, rep.gamma_recomputed, cert.nu, cert.mu);
    if (!rel_close(rep.tau_D_recomputed, cert.tau_D, 1e-9))
        fail("tau_D does not recompute: " + std::to_string(rep.tau_D_recomputed) + " vs " + std::to_string(cert.tau_D));

    rep.passed = rep.failures.empty();
    return rep;
}

}  // namespace hyperswitch
