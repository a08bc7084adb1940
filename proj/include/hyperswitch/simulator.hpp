#pragma once

#include <optional>
#include <vector>

#include "hyperswitch/certifier.hpp"
#include "hyperswitch/core_model.hpp"
#include "hyperswitch/signals.hpp"

namespace hyperswitch {

struct GridSpec {
    int n_x = 201;      // points on [0, 1], both ends included
    double cfl = 0.9;   // in (0, 1]
    int stride = 1;     // record every stride-th time step (switches always recorded)
    bool keep_states = true;

    double dx() const { return 1.0 / (n_x - 1); }
    void validate() const;
};

struct DecayFit {
    double rate = 0.0;         // negated slope of ln l2; positive means decay
    double C = 1.0;            // exp(intercept)
    double residual = 0.0;     // RMS residual of the log fit
    double t0 = 0.0, t1 = 0.0;
    int samples = 0;
    bool zero_norm = false;    // l2 vanished on the window; rate is -inf
};

struct Trace {
    Vector x;
    std::vector<double> times;
    std::vector<Matrix> states;   // physical w, n x n_x per sample (if kept)
    std::vector<double> l2;
    std::vector<int> mode;        // active mode at the sample (the new mode at a switch)
    std::vector<int> prev_mode;   // mode just before the sample; differs from mode at switches
    std::vector<double> lyap;     // V with the active mode's weights
    std::vector<double> lyap_left;  // V with prev_mode's weights (left limit at switches)
    std::optional<DecayFit> fit;

    bool is_switch(std::size_t k) const { return mode[k] != prev_mode[k]; }
};

/// Default initial profile: sin(2 pi x) in every component.
Matrix default_initial_profile(int n, int n_x);

/// First-order upwind in the characteristic variables of the active mode
/// followed by an explicit Euler source step on the transported state; incoming characteristics are set from G
/// after each step. Time steps land exactly on switch times, where
/// y <- S_new S_old^-1 y keeps w continuous.
Trace simulate(const SwitchedSystem& sys, const SwitchingSignal& signal, const Matrix& w0, const GridSpec& grid);

/// Fills lyap and lyap_left: V = int w^T (e^{2 mu x} M- + e^{-2 mu x} M+) w dx.
/// Requires the trace's states. Throws CertificateMismatch.
Trace lyapunov_trace(Trace trace, const SwitchedSystem& sys, const Certificate& cert);

/// Least-squares fit of ln l2 against t on [t0, t1] (default: second half).
/// Throws DegenerateWindow with fewer than 8 samples.
DecayFit estimate_decay(const Trace& trace, std::optional<double> t0 = std::nullopt,
                        std::optional<double> t1 = std::nullopt);

/// Trapezoidal integral of samples on the uniform grid over [0, 1].
double trapezoid(const Vector& values);

}  // namespace hyperswitch
