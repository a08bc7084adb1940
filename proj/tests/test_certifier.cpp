#include <doctest.h>

#include <chrono>
#include <cmath>

#include "hyperswitch/certifier.hpp"
#include "hyperswitch/errors.hpp"
#include "support.hpp"

using namespace hyperswitch;
using hs_test::Gen;

namespace {

Certificate reference_damped_certificate() {
    Certificate c;
    c.variant = Variant::CommonSignFixed;
    c.Q = {hs_test::vec({1.5, 1.0}), hs_test::vec({1.5, 1.0})};
    c.mu = {-0.2, -0.2};
    c.nu = 0.1;
    return c;
}

SearchOptions coarse() {
    SearchOptions o;
    o.mu_grid = SearchOptions::default_mu_grid(13, -1.5, 1.5);
    o.nu_iters = 25;
    o.refine_mu = false;
    return o;
}

// Random system sharing the sign structure across modes.
SwitchedSystem random_fixed_sign(Gen& g, int modes, int n, int m, double f_scale, double g_scale) {
    std::vector<Mode> ms;
    for (int i = 0; i < modes; ++i) ms.push_back(hs_test::characteristic_mode(g, n, m, f_scale, g_scale));
    return SwitchedSystem(ms);
}

}  // namespace

TEST_CASE("variant names round-trip") {
    for (Variant v : {Variant::UnswitchedProp21, Variant::CommonSignFixed, Variant::DwellSignFixed,
                      Variant::CommonSignFree, Variant::DwellSignFree, Variant::MuZero, Variant::DiagonalSource,
                      Variant::OneSigned})
        CHECK(variant_from_string(to_string(v)) == v);
    CHECK(variant_from_string("dwellsignfree") == Variant::DwellSignFree);
    CHECK_THROWS_AS(variant_from_string("Nope"), ParseError);
    CHECK(is_dwell_variant(Variant::DwellSignFixed));
    CHECK_FALSE(is_dwell_variant(Variant::MuZero));
}

TEST_CASE("dwell_time_bound formulas") {
    CHECK(dwell_time_bound(Variant::DwellSignFixed, 2.0, 0.15, {0.15, 0.15}) ==
          doctest::Approx(std::log(2.0) / 0.3).epsilon(1e-14));
    CHECK(dwell_time_bound(Variant::DwellSignFixed, 2.0, 0.15, {0.15, 0.15}) == doctest::Approx(2.3105).epsilon(2e-5));
    CHECK(dwell_time_bound(Variant::DwellSignFixed, 1.0, 0.2, {0.1, 0.1}) == 0.0);
    CHECK(dwell_time_bound(Variant::DwellSignFixed, 1.0, 0.2, {0.1, 0.3}) == doctest::Approx(0.2 / 0.2));
    CHECK(dwell_time_bound(Variant::CommonSignFixed, 3.0, 0.2, {0.1, 0.3}) == 0.0);

    // Scalar Example B at gamma = 1 and nu = mu - F: -2 mu / (mu - F).
    const double f = -1.0, mu = -0.5, nu = mu - f;
    const double got = dwell_time_bound(Variant::DwellSignFree, 1.0, nu, {mu, mu});
    CHECK(got == doctest::Approx(-2 * mu / (mu - f)));
    // A single mode: |mu1| / nu.
    CHECK(dwell_time_bound(Variant::DwellSignFree, 1.0, 0.5, {-0.25}) == doctest::Approx(0.5));
}

TEST_CASE("check_certificate examples") {
    const SwitchedSystem damped = hs_test::example_a(0.3);
    const AuditReport ok = check_certificate(damped, reference_damped_certificate());
    CHECK(ok.passed);
    for (const Margin& m : ok.entries) CHECK(m.value >= -kTolFeas);

    Certificate fast = reference_damped_certificate();
    fast.nu = 0.2;
    const AuditReport bad = check_certificate(damped, fast);
    CHECK_FALSE(bad.passed);
    bool interior_failed = false;
    for (const Margin& m : bad.entries)
        if (m.label.find("interior") != std::string::npos && m.value < -kTolFeas) interior_failed = true;
    CHECK(interior_failed);

    Certificate negative = reference_damped_certificate();
    negative.Q[1](0) = -1.5;
    const AuditReport neg = check_certificate(damped, negative);
    CHECK_FALSE(neg.passed);
    CHECK_FALSE(neg.failures.empty());

    Certificate wrong_tau = reference_damped_certificate();
    wrong_tau.tau_D = 1.0;
    CHECK_FALSE(check_certificate(damped, wrong_tau).passed);

    Certificate wrong_size = reference_damped_certificate();
    wrong_size.Q.pop_back();
    CHECK_FALSE(check_certificate(damped, wrong_size).passed);
}

TEST_CASE("reference weights certify the Example A dwell bound") {
    const SwitchedSystem a = hs_test::example_a(0.0);
    const std::vector<Vector> q = {hs_test::vec({0.75, 2.0}), hs_test::vec({1.5, 1.0})};
    CHECK(certificate_gamma(a, Variant::DwellSignFixed, q) == 2.0);
    const Certificate c = make_certificate(a, Variant::DwellSignFixed, q, {0.15, 0.15}, 0.15);
    CHECK(c.gamma == 2.0);
    CHECK(c.tau_D == doctest::Approx(2.3105).epsilon(5e-4 / 2.3105));
    CHECK(check_certificate(a, c).passed);
    CHECK(max_nu_for_weights(a, Variant::DwellSignFixed, q, {0.15, 0.15}) >= 0.15 - 1e-9);
}

TEST_CASE("feasibility_fixed examples") {
    SUBCASE("Example A damped forces equal weights in the feasible ratio band") {
        const SwitchedSystem damped = hs_test::example_a(0.3);
        const FeasibilityResult r = feasibility_fixed(damped, Variant::CommonSignFixed, {-0.2, -0.2}, 0.1);
        REQUIRE(r.status == FeasStatus::Feasible);
        CHECK(hs_test::max_abs(r.Q[0] - r.Q[1]) < 1e-9);
        // Boundary of both modes: q1 / q2 in [1.44, e^{0.8} / 1.44]; 1.5 lies inside.
        const double ratio = r.Q[0](0) / r.Q[0](1);
        CHECK(ratio >= 1.44 - 1e-6);
        CHECK(ratio <= std::exp(0.8) / 1.44 + 1e-6);
    }
    SUBCASE("Example A undamped is infeasible on every default grid point") {
        const SwitchedSystem a = hs_test::example_a(0.0);
        for (double mu : SearchOptions::default_mu_grid())
            CHECK(feasibility_fixed(a, Variant::CommonSignFixed, {mu, mu}, 0.01).status != FeasStatus::Feasible);
    }
    SUBCASE("scalar contraction") {
        const SwitchedSystem s({hs_test::diag_mode(hs_test::vec({1}), 0, hs_test::scalar(-1), hs_test::scalar(0.5))});
        const FeasibilityResult r = feasibility_fixed(s, Variant::UnswitchedProp21, {0.0}, 0.5);
        CHECK(r.status == FeasStatus::Feasible);
        CHECK(r.margin >= -kTolFeas);
        CHECK(feasibility_fixed(s, Variant::UnswitchedProp21, {0.0}, 1.01).status == FeasStatus::Infeasible);
    }
}

TEST_CASE("certify examples") {
    SUBCASE("Example A damped") {
        const CertifyResult r = certify(hs_test::example_a(0.3), Variant::CommonSignFixed);
        REQUIRE(r.feasible);
        CHECK(r.certificate->nu >= 0.1);
        CHECK(r.certificate->tau_D == 0.0);
        CHECK(r.certificate->gamma == 1.0);
    }
    SUBCASE("Example A undamped has no common certificate") {
        const CertifyResult r = certify(hs_test::example_a(0.0), Variant::CommonSignFixed);
        CHECK_FALSE(r.feasible);
        CHECK(r.best_margin < 0.0);
    }
    SUBCASE("Example A undamped dwell search beats the reference weights") {
        const SwitchedSystem a = hs_test::example_a(0.0);
        const CertifyResult r = certify(a, Variant::DwellSignFixed);
        REQUIRE(r.feasible);
        CHECK(r.certificate->gamma > 1.0);
        CHECK(r.certificate->tau_D <= 2.3105 + 1e-3);
        CHECK(check_certificate(a, *r.certificate).passed);
    }
    SUBCASE("Example B analytic optima") {
        SearchOptions o;
        o.mu_tol = 1e-6;
        for (auto [f, gain, expect] : {std::tuple{-1.0, 2.0, 4.5178}, std::tuple{0.1, 0.5, 2.3372}}) {
            const auto t0 = std::chrono::steady_clock::now();
            const CertifyResult r = certify(hs_test::example_b(f, gain), Variant::DwellSignFree, o);
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            REQUIRE(r.feasible);
            const double analytic = 2 * std::log(gain) / (std::log(gain) + f) * (f < 0 ? -1.0 : 1.0);
            CHECK(std::abs(analytic) == doctest::Approx(expect).epsilon(1e-4));
            CHECK(r.certificate->tau_D == doctest::Approx(expect).epsilon(5e-3 / expect));
            CHECK(secs < 10.0);
        }
    }
}

TEST_CASE("certify preconditions") {
    const SwitchedSystem b = hs_test::example_b(-1.0, 2.0);
    CHECK_THROWS_AS(certify(b, Variant::CommonSignFixed), VariantPreconditionViolated);
    CHECK_THROWS_AS(certify(b, Variant::DwellSignFixed), VariantPreconditionViolated);
    CHECK_THROWS_AS(certify(b, Variant::OneSigned), VariantPreconditionViolated);
    CHECK_THROWS_AS(certify(hs_test::example_a(0.0), Variant::UnswitchedProp21), VariantPreconditionViolated);

    const Mode coupled = hs_test::diag_mode(hs_test::vec({-1, 1}), 1, hs_test::mat2(-1, 0.5, 0.5, -1), Matrix::Zero(2, 2));
    CHECK_THROWS_AS(certify(SwitchedSystem({coupled}), Variant::DiagonalSource), VariantPreconditionViolated);
}

TEST_CASE("every certificate from certify passes the audit") {
    Gen g(2024);
    int feasible = 0;
    for (int trial = 0; trial < 16; ++trial) {
        const int n = g.integer(1, 2);
        const int m = g.integer(0, n);
        const SwitchedSystem sys = random_fixed_sign(g, 2, n, m, 0.8, 0.9);
        for (Variant v : {Variant::CommonSignFixed, Variant::DwellSignFixed}) {
            const CertifyResult r = certify(sys, v, coarse());
            if (!r.feasible) continue;
            ++feasible;
            const AuditReport rep = check_certificate(sys, *r.certificate, coarse());
            CHECK(rep.passed);
            CHECK(r.certificate->nu > 0.0);
            CHECK(r.certificate->gamma >= 1.0);
            for (const Vector& q : r.certificate->Q) CHECK(q.minCoeff() >= kQFloor * (1 - 1e-12));
        }
    }
    CHECK(feasible >= 4);
}

TEST_CASE("feasibility is monotone in nu") {
    Gen g(61);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const int n = g.integer(1, 2);
        const SwitchedSystem sys = random_fixed_sign(g, 2, n, g.integer(0, n), 0.8, 0.8);
        const double mu = g.uniform(-1, 1);
        const double nu = g.uniform(0.02, 0.6);
        const FeasibilityResult r = feasibility_fixed(sys, Variant::CommonSignFixed, {mu, mu}, nu);
        if (r.status != FeasStatus::Feasible) continue;
        ++checked;
        for (double scale : {0.1, 0.5, 0.9})
            CHECK(feasibility_fixed(sys, Variant::CommonSignFixed, {mu, mu}, scale * nu).status == FeasStatus::Feasible);
    }
    CHECK(checked >= 3);
}

TEST_CASE("diagonal-source fast path agrees with the generic path") {
    Gen g(88);
    int feasible = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = g.integer(1, 3);
        const int m = g.integer(0, n);
        std::vector<Mode> ms;
        for (int i = 0; i < 2; ++i) {
            const Vector f = g.matrix(n, 1, 1.0).col(0);
            ms.push_back(hs_test::diag_mode(hs_test::sorted_speeds(g.speeds(n, m)), m, Matrix(f.asDiagonal()),
                                            g.matrix(n, n, 0.8)));
        }
        const SwitchedSystem sys(ms);
        const double mu = g.uniform(-1, 1), nu = g.uniform(0.01, 0.8);
        const FeasibilityResult a = feasibility_fixed(sys, Variant::DiagonalSource, {mu, mu}, nu);
        const FeasibilityResult b = feasibility_fixed(sys, Variant::CommonSignFixed, {mu, mu}, nu);
        if (std::abs(a.margin) < 1e-7 || std::abs(b.margin) < 1e-7) continue;
        CHECK((a.status == FeasStatus::Feasible) == (b.status == FeasStatus::Feasible));
        if (a.status == FeasStatus::Feasible) ++feasible;
    }
    CHECK(feasible > 0);
}

TEST_CASE("MuZero and OneSigned specialize CommonSignFixed") {
    Gen g(12);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = g.integer(1, 2);
        const int m = g.coin() ? 0 : n;
        const SwitchedSystem sys = random_fixed_sign(g, 2, n, m, 0.8, 0.8);
        const double nu = g.uniform(0.01, 0.6);
        const FeasibilityResult base0 = feasibility_fixed(sys, Variant::CommonSignFixed, {0.0, 0.0}, nu);
        const FeasibilityResult zero = feasibility_fixed(sys, Variant::MuZero, {0.0, 0.0}, nu);
        if (std::abs(base0.margin) > 1e-7)
            CHECK((base0.status == FeasStatus::Feasible) == (zero.status == FeasStatus::Feasible));

        const double mu = g.uniform(-1, 1);
        const FeasibilityResult base = feasibility_fixed(sys, Variant::CommonSignFixed, {mu, mu}, nu);
        const FeasibilityResult one = feasibility_fixed(sys, Variant::OneSigned, {mu, mu}, nu);
        if (std::abs(base.margin) > 1e-7)
            CHECK((base.status == FeasStatus::Feasible) == (one.status == FeasStatus::Feasible));
    }
}

TEST_CASE("certificate_gamma detects incompatible kernels") {
    // Mode 2 reuses mode 1 speeds with a rotated S; M+ kernels then differ.
    const Mode m1 = hs_test::diag_mode(hs_test::vec({-1, 1}), 1, Matrix::Zero(2, 2), Matrix::Zero(2, 2));
    BoundaryPhysical bp{hs_test::mat2(0, 0, 0, 1), hs_test::mat2(1, 0, 0, 0)};
    const Matrix rot = hs_test::mat2(1, 0.5, 0.2, 1);
    const Matrix l = rot.inverse() * hs_test::diag2(-1, 1) * rot;
    const Mode m2 = mode_from_physical(l, Matrix::Zero(2, 2), BoundaryPhysical{bp.B0 * rot, bp.B1 * rot});
    const SwitchedSystem sys({m1, m2});
    CHECK_THROWS_AS(certificate_gamma(sys, Variant::DwellSignFixed, {hs_test::vec({1, 1}), hs_test::vec({1, 1})}),
                    KernelMismatch);
}
