#include <doctest.h>

#include <cmath>
#include <numbers>

#include "decay_check.hpp"
#include "hyperswitch/errors.hpp"
#include "hyperswitch/simulator.hpp"
#include "support.hpp"

using namespace hyperswitch;
using hs_test::Gen;

namespace {

Trace synthetic(const std::vector<double>& l2) {
    Trace tr;
    for (std::size_t k = 0; k < l2.size(); ++k) {
        tr.times.push_back(0.1 * static_cast<double>(k));
        tr.l2.push_back(l2[k]);
    }
    return tr;
}

double bump(double x) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    const double s = std::sin(std::numbers::pi * x);
    return s * s * s * s;
}

// Max-norm error at t = 0.5 of a scalar transport with absorbing inflow.
double transport_error(int n_x, double cfl) {
    const SwitchedSystem sys({hs_test::diag_mode(hs_test::vec({0.8}), 0, hs_test::scalar(0), hs_test::scalar(0))});
    Matrix w0(1, n_x);
    for (int j = 0; j < n_x; ++j) w0(0, j) = bump(static_cast<double>(j) / (n_x - 1));
    GridSpec grid;
    grid.n_x = n_x;
    grid.cfl = cfl;
    const Trace tr = simulate(sys, SwitchingSignal{0, {}, 0.5}, w0, grid);
    double err = 0.0;
    for (int j = 0; j < n_x; ++j) {
        const double x = static_cast<double>(j) / (n_x - 1);
        err = std::max(err, std::abs(tr.states.back()(0, j) - bump(x - 0.8 * 0.5)));
    }
    return err;
}

}  // namespace

TEST_CASE("estimate_decay on exact curves") {
    std::vector<double> e, c;
    for (int k = 0; k < 100; ++k) {
        e.push_back(3.0 * std::exp(-0.5 * 0.1 * k));
        c.push_back(2.0);
    }
    const DecayFit fe = estimate_decay(synthetic(e));
    CHECK(fe.rate == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(fe.C == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(fe.residual < 1e-10);
    CHECK(estimate_decay(synthetic(c)).rate == doctest::Approx(0.0));

    CHECK_THROWS_AS(estimate_decay(synthetic({1, 1, 1, 1, 1})), DegenerateWindow);
    const DecayFit z = estimate_decay(synthetic(std::vector<double>(40, 0.0)));
    CHECK(z.zero_norm);
    CHECK(std::isinf(z.rate));
    // Explicit window.
    const DecayFit w = estimate_decay(synthetic(e), 1.0, 5.0);
    CHECK(w.t0 == 1.0);
    CHECK(w.samples == 41);
}

TEST_CASE("trapezoid integrates linear profiles exactly") {
    CHECK(trapezoid(Vector::LinSpaced(11, 0.0, 1.0)) == doctest::Approx(0.5));
    CHECK(trapezoid(Vector::Constant(5, 2.0)) == doctest::Approx(2.0));
}

TEST_CASE("simulate records every switch once and keeps w continuous") {
    const SwitchedSystem a = hs_test::example_a(0.0);
    const SwitchingSignal sig = periodic_signal(0.7, {0, 1}, 3.0);
    GridSpec grid;
    grid.n_x = 51;
    grid.stride = 5;
    const Trace tr = simulate(a, sig, default_initial_profile(2, 51), grid);
    for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
    for (const Switch& sw : sig.switches) {
        int hits = 0;
        for (std::size_t k = 0; k < tr.times.size(); ++k)
            if (tr.times[k] == sw.time) {
                ++hits;
                CHECK(tr.is_switch(k));
                CHECK(tr.mode[k] == sw.mode);
            }
        CHECK(hits == 1);
    }
    CHECK(tr.times.back() == 3.0);
    for (double v : tr.l2) CHECK(v >= 0.0);
}

TEST_CASE("simulate input errors") {
    const SwitchedSystem a = hs_test::example_a(0.0);
    GridSpec grid;
    grid.n_x = 21;
    CHECK_THROWS_AS(simulate(a, SwitchingSignal{0, {}, 1.0}, Matrix::Zero(2, 20), grid), DimensionMismatch);
    CHECK_THROWS(simulate(a, SwitchingSignal{0, {}, 0.0}, Matrix::Zero(2, 21), grid));
    CHECK_THROWS(simulate(a, SwitchingSignal{0, {{0.5, 2}}, 1.0}, Matrix::Zero(2, 21), grid));
    grid.cfl = 1.5;
    CHECK_THROWS(simulate(a, SwitchingSignal{0, {}, 1.0}, Matrix::Zero(2, 21), grid));
}

TEST_CASE("zero state stays zero and has zero Lyapunov value") {
    const SwitchedSystem a = hs_test::example_a(0.3);
    GridSpec grid;
    grid.n_x = 31;
    Trace tr = simulate(a, periodic_signal(1.0, {0, 1}, 3.0), Matrix::Zero(2, 31), grid);
    for (double v : tr.l2) CHECK(v == 0.0);
    Certificate c;
    c.Q = {hs_test::vec({1.5, 1}), hs_test::vec({1.5, 1})};
    c.mu = {-0.2, -0.2};
    c.nu = 0.1;
    tr = lyapunov_trace(tr, a, c);
    for (double v : tr.lyap) CHECK(v == 0.0);
}

TEST_CASE("absorbing boundary empties the domain") {
    const Mode md = hs_test::diag_mode(hs_test::vec({-0.5, 1.0}), 1, Matrix::Zero(2, 2), Matrix::Zero(2, 2));
    GridSpec grid;
    grid.n_x = 101;
    const Trace tr = simulate(SwitchedSystem({md}), SwitchingSignal{0, {}, 4.0}, default_initial_profile(2, 101), grid);
    CHECK(tr.l2.front() > 0.5);
    CHECK(tr.l2.back() < 1e-6 * tr.l2.front());
}

TEST_CASE("lyapunov_trace reduces to a weighted norm for S = I and mu = 0") {
    const SwitchedSystem a = hs_test::example_a(0.0);
    GridSpec grid;
    grid.n_x = 41;
    Matrix w0(2, 41);
    for (int j = 0; j < 41; ++j) {
        w0(0, j) = std::cos(0.3 * j);
        w0(1, j) = 0.1 * j;
    }
    Trace tr = simulate(a, periodic_signal(0.5, {0, 1}, 1.2), w0, grid);
    Certificate c;
    c.Q = {hs_test::vec({2, 3}), hs_test::vec({2, 3})};
    c.mu = {0.0, 0.0};
    tr = lyapunov_trace(tr, a, c);
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const Matrix& w = tr.states[k];
        const double expect = 2 * trapezoid(w.row(0).cwiseAbs2().transpose()) + 3 * trapezoid(w.row(1).cwiseAbs2().transpose());
        CHECK(tr.lyap[k] == doctest::Approx(expect).epsilon(1e-12));
    }
    c.Q.pop_back();
    CHECK_THROWS_AS(lyapunov_trace(tr, a, c), CertificateMismatch);
}

TEST_CASE("lossless permutation boundary conserves energy up to dissipation") {
    // y-(1) = y+(1) and y+(0) = y-(0): nothing enters or leaves.
    const Mode md = hs_test::diag_mode(hs_test::vec({-1.0, 1.0}), 1, Matrix::Zero(2, 2), hs_test::mat2(0, 1, 1, 0));
    const SwitchedSystem sys({md});
    double previous_loss = 1.0;
    for (int n_x : {101, 201, 401}) {
        GridSpec grid;
        grid.n_x = n_x;
        grid.cfl = 0.8;
        const Trace tr = simulate(sys, SwitchingSignal{0, {}, 1.0}, default_initial_profile(2, n_x), grid);
        for (std::size_t k = 1; k < tr.l2.size(); ++k) CHECK(tr.l2[k] <= tr.l2[k - 1] * (1 + 1e-12));
        const double loss = 1.0 - tr.l2.back() / tr.l2.front();
        CHECK(loss >= -1e-12);
        CHECK(loss < previous_loss);
        previous_loss = loss;
    }
    // Courant number 1 is the exact shift.
    GridSpec exact;
    exact.n_x = 101;
    exact.cfl = 1.0;
    const Trace tr = simulate(sys, SwitchingSignal{0, {}, 1.0}, default_initial_profile(2, 101), exact);
    CHECK(tr.l2.back() == doctest::Approx(tr.l2.front()).epsilon(1e-10));
}

TEST_CASE("upwind converges at first order") {
    const double e1 = transport_error(101, 0.5);
    const double e2 = transport_error(201, 0.5);
    const double e3 = transport_error(401, 0.5);
    CHECK(e1 / e2 >= 1.7);
    CHECK(e1 / e2 <= 2.3);
    CHECK(e2 / e3 >= 1.7);
    CHECK(e2 / e3 <= 2.3);
}

TEST_CASE("certified decay holds on the damped example") {
    const SwitchedSystem a = hs_test::example_a(0.3);
    const CertifyResult r = certify(a, Variant::CommonSignFixed);
    REQUIRE(r.feasible);
    GridSpec grid;
    grid.n_x = 201;
    for (double period : {0.37, 1.0}) {
        const Trace tr = lyapunov_trace(simulate(a, periodic_signal(period, {0, 1}, 6.0), default_initial_profile(2, 201), grid),
                                        a, *r.certificate);
        CHECK(hs_test::lyapunov_excess(tr, r.certificate->nu) <= 0.05);
        // Common weights: V is continuous across switches.
        for (std::size_t k = 0; k < tr.times.size(); ++k)
            CHECK(tr.lyap_left[k] == doctest::Approx(tr.lyap[k]).epsilon(1e-12));
    }
}

TEST_CASE("rate signs on the bundled examples") {
    GridSpec grid;
    grid.n_x = 201;
    grid.cfl = 1.0;
    grid.keep_states = false;
    auto rate = [&](const SwitchedSystem& sys, double period) {
        return simulate(sys, periodic_signal(period, {0, 1}, 12.0), default_initial_profile(sys.n(), 201), grid).fit->rate;
    };
    CHECK(rate(hs_test::example_a(0.0), 1.0) < 0.0);
    CHECK(rate(hs_test::example_a(0.0), 2.4) > 0.0);
    CHECK(rate(hs_test::example_a(0.3), 1.0) > 0.0);
    CHECK(rate(hs_test::example_b(-1.0, 2.0), 1.2) < 0.0);
    CHECK(rate(hs_test::example_b(-1.0, 2.0), 4.6) > 0.0);
    CHECK(rate(hs_test::example_b(0.1, 0.5), 0.9) < 0.0);
    CHECK(rate(hs_test::example_b(0.1, 0.5), 2.4) > 0.0);
}
