#pragma once

#include <cstdint>
#include <vector>

namespace hyperswitch {

struct Switch {
    double time = 0.0;
    int mode = 0;
};

/// Piecewise-constant, right-continuous mode schedule on [0, horizon]:
/// the mode is initial_mode until the first switch time, and takes the new
/// mode at each switch instant.
struct SwitchingSignal {
    int initial_mode = 0;
    std::vector<Switch> switches;
    double horizon = 0.0;

    /// Throws std::invalid_argument for unsorted times, times outside
    /// (0, horizon), repeated modes or indices outside [0, mode_count).
    void validate(int mode_count = -1) const;
    int mode_at(double t) const;
};

/// Switches at k * period < horizon (k >= 1), cycling through `cycle`
/// starting from cycle[0] at t = 0.
SwitchingSignal periodic_signal(double period, const std::vector<int>& cycle, double horizon);

/// Number of switch times in the half-open interval (tau, t].
int count_switches(const SwitchingSignal& signal, double tau, double t);

struct DwellCheck {
    bool ok = true;
    int first = -1;  // worst violating pair of switch indices
    int last = -1;
    double excess = 0.0;  // (b - a + 1) - N0 - (s_b - s_a) / tau_D at the worst pair
};

/// Membership in the average-dwell-time class: N(tau, t) <= N0 + (t - tau) / tau_D
/// for all tau < t, checked on every pair of switch times.
DwellCheck validate_dwell(const SwitchingSignal& signal, double tau_D, double N0);

/// Random signal with gaps uniform on [tau_D, 2 tau_D] and the next mode
/// drawn uniformly among the others; deterministic in the seed.
SwitchingSignal random_dwell_signal(std::uint64_t seed, double tau_D, int N0, double horizon, int mode_count,
                                    int initial_mode = 0);

}  // namespace hyperswitch
