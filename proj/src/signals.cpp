#include "hyperswitch/signals.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace hyperswitch {

void SwitchingSignal::validate(int mode_count) const {
    auto check_mode = [&](int m) {
        if (m < 0 || (mode_count >= 0 && m >= mode_count))
            throw std::invalid_argument("signal refers to mode " + std::to_string(m) + " which does not exist");
    };
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("signal horizon must be finite and >= 0");
    check_mode(initial_mode);
    double prev_t = 0.0;
    int prev_mode = initial_mode;
    for (const Switch& s : switches) {
        if (!(s.time > prev_t)) throw std::invalid_argument("switch times must be positive and strictly increasing");
        if (!(s.time < horizon)) throw std::invalid_argument("switch times must lie before the horizon");
        check_mode(s.mode);
        if (s.mode == prev_mode) throw std::invalid_argument("a switch must change the mode");
        prev_t = s.time;
        prev_mode = s.mode;
    }
}

int SwitchingSignal::mode_at(double t) const {
    int m = initial_mode;
    for (const Switch& s : switches) {
        if (s.time > t) break;
        m = s.mode;
    }
    return m;
}

SwitchingSignal periodic_signal(double period, const std::vector<int>& cycle, double horizon) {
    if (!(period > 0.0)) throw std::invalid_argument("period must be positive");
    if (cycle.empty()) throw std::invalid_argument("mode cycle must not be empty");
    SwitchingSignal sig;
    sig.initial_mode = cycle.front();
    sig.horizon = horizon;
    if (cycle.size() == 1) return sig;
    for (std::size_t k = 0; k < cycle.size(); ++k)
        if (cycle[k] == cycle[(k + 1) % cycle.size()]) throw std::invalid_argument("mode cycle repeats a mode");
    for (long k = 1;; ++k) {
        const double t = static_cast<double>(k) * period;
        if (!(t < horizon * (1.0 - 1e-12))) break;
        sig.switches.push_back({t, cycle[static_cast<std::size_t>(k) % cycle.size()]});
    }
    return sig;
}

int count_switches(const SwitchingSignal& signal, double tau, double t) {
    return static_cast<int>(std::count_if(signal.switches.begin(), signal.switches.end(),
                                          [&](const Switch& s) { return s.time > tau && s.time <= t; }));
}

DwellCheck validate_dwell(const SwitchingSignal& signal, double tau_D, double N0) {
    if (!(tau_D > 0.0)) throw std::invalid_argument("tau_D must be positive");
    if (N0 < 0.0) throw std::invalid_argument("N0 must be nonnegative");
    DwellCheck out;
    const auto& s = signal.switches;
    for (std::size_t a = 0; a < s.size(); ++a) {
        for (std::size_t b = a; b < s.size(); ++b) {
            const double excess =
                static_cast<double>(b - a + 1) - N0 - (s[b].time - s[a].time) / tau_D;
            if (excess > 1e-12 && excess > out.excess) {
                out.ok = false;
                out.excess = excess;
                out.first = static_cast<int>(a);
                out.last = static_cast<int>(b);
            }
        }
    }
    return out;
}

SwitchingSignal random_dwell_signal(std::uint64_t seed, double tau_D, int N0, double horizon, int mode_count,
                                    int initial_mode) {
    if (!(tau_D > 0.0)) throw std::invalid_argument("tau_D must be positive");
    if (N0 < 0) throw std::invalid_argument("N0 must be nonnegative");
    if (mode_count < 1) throw std::invalid_argument("mode count must be positive");
    SwitchingSignal sig;
    sig.initial_mode = initial_mode;
    sig.horizon = horizon;
    if (mode_count == 1) return sig;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gap(tau_D, 2.0 * tau_D);
    std::uniform_int_distribution<int> pick(0, mode_count - 2);
    int mode = initial_mode;
    double t = gap(rng);
    while (t < horizon) {
        int next = pick(rng);
        if (next >= mode) ++next;
        sig.switches.push_back({t, next});
        mode = next;
        t += gap(rng);
    }
    return sig;
}

}  // namespace hyperswitch
