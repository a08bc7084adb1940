#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "hyperswitch/errors.hpp"
#include "hyperswitch/io.hpp"

namespace hyperswitch::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config;
    std::string variant;
    std::string out;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool plot = false;
};

std::string sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + sig6(v[k]);
    return s;
}

class Session {
public:
    Session(const Globals& g, std::ostream& out, std::ostream& err) : g_(g), out_(out), err_(err) {}

    ScenarioConfig load() const {
        if (g_.config.empty()) throw ParseError("--config is required");
        ScenarioConfig c = load_config(g_.config);
        if (!c.system) throw ParseError("config has no system");
        c.search.jobs = std::max(1, g_.jobs);
        return c;
    }

    fs::path out_dir(const ScenarioConfig& c) const {
        fs::path dir = !g_.out.empty() ? fs::path(g_.out) : fs::path(c.out_dir.value_or("out"));
        fs::create_directories(dir);
        return dir;
    }

    Variant variant(const ScenarioConfig& c, Variant fallback) const {
        if (!g_.variant.empty()) return variant_from_string(g_.variant);
        return c.variant.value_or(fallback);
    }

    SwitchingSignal signal(const ScenarioConfig& c, std::optional<double> period = std::nullopt) const {
        if (!c.signal) throw ParseError("config has no signal");
        Json j = *c.signal;
        if (period) {
            if (!j.contains("periodic")) throw ParseError("a period sweep needs a periodic signal");
            j["periodic"]["period"] = *period;
        }
        return signal_from_json(j, c.system->size(), g_.seed);
    }

    Matrix initial(const ScenarioConfig& c) const {
        return c.initial ? *c.initial : default_initial_profile(c.system->n(), c.grid.n_x);
    }

    void print_certificate(const Certificate& cert, const AuditReport& audit) const {
        out_ << "variant: " << to_string(cert.variant) << "\n";
        out_ << "nu = " << sig6(cert.nu) << "\n";
        out_ << "mu = [" << join(cert.mu) << "]\n";
        for (std::size_t i = 0; i < cert.Q.size(); ++i) {
            std::vector<double> q(cert.Q[i].data(), cert.Q[i].data() + cert.Q[i].size());
            out_ << "Q" << i + 1 << " = diag(" << join(q) << ")\n";
        }
        if (is_dwell_variant(cert.variant)) {
            out_ << "gamma = " << sig6(cert.gamma) << "\n";
            out_ << "tau_D = " << sig6(cert.tau_D) << "\n";
        }
        double worst = std::numeric_limits<double>::infinity();
        for (const Margin& m : audit.entries) worst = std::min(worst, m.value);
        out_ << "audit: " << (audit.passed ? "passed" : "FAILED") << " (worst margin " << sig6(worst) << ")\n";
        if (audit.x_grid_caveat) out_ << "note: interior inequality checked on an x grid only\n";
        for (const std::string& f : audit.failures) err_ << "audit failure: " << f << "\n";
    }

    Json audit_json(const AuditReport& a) const {
        Json entries = Json::array();
        for (const Margin& m : a.entries) entries.push_back(Json{{"label", m.label}, {"margin", m.value}});
        return Json{{"passed", a.passed},
                    {"entries", entries},
                    {"failures", a.failures},
                    {"gamma_recomputed", a.gamma_recomputed},
                    {"tau_D_recomputed", a.tau_D_recomputed},
                    {"x_grid_caveat", a.x_grid_caveat}};
    }

    int emit(const ScenarioConfig& c, const SwitchedSystem& sys, const Certificate& cert, const SearchOptions& opt) const {
        const AuditReport audit = check_certificate(sys, cert, opt);
        print_certificate(cert, audit);
        const fs::path dir = out_dir(c);
        write_json_file(dir / "certificate.json", certificate_to_json(cert));
        write_json_file(dir / "audit.json", audit_json(audit));
        return audit.passed ? kExitOk : kExitNegative;
    }

    int infeasible(const ScenarioConfig& c, Variant v, const CertifyResult& r) const {
        out_ << "variant: " << to_string(v) << "\n";
        out_ << "infeasible: no certificate with nu >= " << sig6(c.search.nu_min) << "\n";
        out_ << "best margin = " << sig6(r.best_margin) << " at mu = [" << join(r.best_mu) << "]\n";
        write_json_file(out_dir(c) / "certify_result.json",
                        Json{{"variant", to_string(v)}, {"feasible", false}, {"best_margin", r.best_margin},
                             {"best_mu", r.best_mu}});
        return kExitNegative;
    }

    int certify_cmd() const {
        const ScenarioConfig c = load();
        const Variant v = variant(c, Variant::CommonSignFixed);
        const CertifyResult r = certify(*c.system, v, c.search);
        if (!r.feasible || !r.certificate) return infeasible(c, v, r);
        out_ << "feasible\n";
        return emit(c, *c.system, *r.certificate, c.search);
    }

    int dwell_cmd(bool ignore_warm) const {
        const ScenarioConfig c = load();
        const SwitchedSystem& sys = *c.system;
        Variant v = variant(c, Variant::DwellSignFixed);
        if (g_.variant.empty() && !is_dwell_variant(v))
            v = sys.common_sign_structure() ? Variant::DwellSignFixed : Variant::DwellSignFree;
        if (!is_dwell_variant(v)) throw ParseError("dwell-bound needs DwellSignFixed or DwellSignFree");

        if (c.warm_start && !ignore_warm) {
            const WarmStart& w = *c.warm_start;
            std::vector<double> mu = w.mu;
            if (mu.size() == 1) mu.assign(static_cast<std::size_t>(sys.size()), mu.front());
            if (static_cast<int>(w.Q.size()) != sys.size() || static_cast<int>(mu.size()) != sys.size())
                throw ParseError("warm_start needs one Q and one mu per mode");
            const double nu = w.nu ? *w.nu : max_nu_for_weights(sys, v, w.Q, mu, c.search);
            if (!(nu > 0.0)) {
                out_ << "warm start weights admit no positive nu\n";
                return kExitNegative;
            }
            out_ << "using warm start weights\n";
            return emit(c, sys, make_certificate(sys, v, w.Q, mu, nu, c.search), c.search);
        }
        const CertifyResult r = certify(sys, v, c.search);
        if (!r.feasible || !r.certificate) return infeasible(c, v, r);
        return emit(c, sys, *r.certificate, c.search);
    }

    int simulate_cmd(const std::string& cert_file) const {
        const ScenarioConfig c = load();
        const SwitchedSystem& sys = *c.system;
        const SwitchingSignal sig = signal(c);
        GridSpec grid = c.grid;
        grid.keep_states = !cert_file.empty();
        Trace tr = simulate(sys, sig, initial(c), grid);
        if (!cert_file.empty()) tr = lyapunov_trace(std::move(tr), sys, certificate_from_json(read_json_file(cert_file)));

        const fs::path dir = out_dir(c);
        write_trace_csv(dir / "trace.csv", tr);
        if (g_.plot) {
            std::ofstream(dir / "trace.svg") << trace_svg(tr, "l2 norm, " + std::to_string(sig.switches.size()) + " switches");
        }
        out_ << "samples: " << tr.times.size() << ", switches: " << sig.switches.size() << "\n";
        if (!tr.fit) {
            out_ << "fitted rate: unavailable (fewer than 8 samples in the fit window)\n";
        } else if (tr.fit->zero_norm) {
            out_ << "fitted rate: inf (state vanished)\n";
        } else {
            out_ << "fitted rate: " << sig6(tr.fit->rate) << " (" << (tr.fit->rate > 0.0 ? "decay" : "growth") << ")\n";
        }
        return kExitOk;
    }

    int sweep_cmd(std::optional<double> lo, std::optional<double> hi, std::optional<int> steps,
                  const std::string& param) const {
        const ScenarioConfig c = load();
        SweepSpec s = c.sweep.value_or(SweepSpec{});
        if (!param.empty()) s.param = param;
        if (lo) s.lo = *lo;
        if (hi) s.hi = *hi;
        if (steps) s.steps = *steps;
        if (s.param != "period") throw ParseError("only the period can be swept");
        if (s.steps < 1) throw ParseError("sweep needs at least one step");
        if (!(s.lo > 0.0) || !(s.hi > s.lo)) throw ParseError("sweep range must satisfy 0 < lo < hi");

        const int points = s.steps + 1;
        std::vector<double> periods(static_cast<std::size_t>(points)), rates(periods.size());
        for (int k = 0; k < points; ++k) periods[static_cast<std::size_t>(k)] = s.lo + (s.hi - s.lo) * k / s.steps;
        GridSpec grid = c.grid;
        grid.keep_states = false;
        const Matrix w0 = initial(c);
        std::vector<SwitchingSignal> signals;
        for (double p : periods) signals.push_back(signal(c, p));

        std::atomic<std::size_t> next{0};
        std::vector<std::string> errors(periods.size());
        auto worker = [&] {
            for (std::size_t k = next++; k < periods.size(); k = next++) {
                try {
                    const Trace tr = simulate(*c.system, signals[k], w0, grid);
                    rates[k] = tr.fit ? tr.fit->rate : std::nan("");
                } catch (const std::exception& e) {
                    errors[k] = e.what();
                }
            }
        };
        const int jobs = std::clamp(g_.jobs, 1, points);
        std::vector<std::thread> pool;
        for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
        worker();
        for (std::thread& t : pool) t.join();
        for (const std::string& e : errors)
            if (!e.empty()) throw Error(e);

        const fs::path dir = out_dir(c);
        std::ofstream csv(dir / "sweep.csv");
        csv << "period,rate\n";
        for (std::size_t k = 0; k < periods.size(); ++k) {
            csv << format_double(periods[k]) << ',' << format_double(rates[k]) << '\n';
            out_ << "period " << sig6(periods[k]) << ": rate " << sig6(rates[k]) << "\n";
        }
        bool found = false;
        for (std::size_t k = 0; k + 1 < periods.size(); ++k) {
            if ((rates[k] > 0.0) != (rates[k + 1] > 0.0)) {
                out_ << "sign change in [" << sig6(periods[k]) << ", " << sig6(periods[k + 1]) << "]\n";
                found = true;
                break;
            }
        }
        if (!found) out_ << "no sign change in the swept range\n";
        if (c.warm_start && c.warm_start->nu) {
            const Variant v = c.system->common_sign_structure() ? Variant::DwellSignFixed : Variant::DwellSignFree;
            std::vector<double> mu = c.warm_start->mu;
            if (mu.size() == 1) mu.assign(static_cast<std::size_t>(c.system->size()), mu.front());
            const Certificate cert = make_certificate(*c.system, v, c.warm_start->Q, mu, *c.warm_start->nu, c.search);
            out_ << "certified dwell bound (warm start): " << sig6(cert.tau_D) << "\n";
        }
        return kExitOk;
    }

    int validate_cmd(const std::string& file, double tau_d, double n0) const {
        const SwitchingSignal sig = signal_from_json(read_json_file(file), -1, g_.seed);
        const DwellCheck d = validate_dwell(sig, tau_d, n0);
        if (d.ok) {
            out_ << "signal has average dwell time " << sig6(tau_d) << " with N0 = " << sig6(n0) << "\n";
            return kExitOk;
        }
        out_ << "violation between switches " << d.first << " and " << d.last << " (t = "
             << sig6(sig.switches[static_cast<std::size_t>(d.first)].time) << " .. "
             << sig6(sig.switches[static_cast<std::size_t>(d.last)].time) << ", excess " << sig6(d.excess) << ")\n";
        return kExitNegative;
    }

private:
    const Globals& g_;
    std::ostream& out_;
    std::ostream& err_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Certify and simulate switched linear hyperbolic systems", "hyperswitch"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config, "Scenario JSON file");
    app.add_option("--variant", g.variant, "Certificate variant");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--seed", g.seed, "Seed for random signals");
    app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--plot", g.plot, "Write an SVG plot");

    auto* certify_sc = app.add_subcommand("certify", "Search a Lyapunov certificate");
    auto* dwell_sc = app.add_subcommand("dwell-bound", "Compute a dwell-time bound");
    bool ignore_warm = false;
    dwell_sc->add_flag("--ignore-warm-start", ignore_warm, "Search instead of using the warm start weights");
    auto* sim_sc = app.add_subcommand("simulate", "Simulate the configured signal");
    std::string cert_file;
    sim_sc->add_option("--certificate", cert_file, "Certificate JSON used to evaluate V");
    auto* sweep_sc = app.add_subcommand("sweep", "Sweep the switching period");
    std::optional<double> lo, hi;
    std::optional<int> steps;
    std::string param;
    sweep_sc->add_option("--param", param, "Swept parameter (period)");
    sweep_sc->add_option("--lo", lo);
    sweep_sc->add_option("--hi", hi);
    sweep_sc->add_option("--steps", steps);
    auto* val_sc = app.add_subcommand("validate-signal", "Check average dwell time membership");
    std::string signal_file;
    double tau_d = 0.0, n0 = 0.0;
    val_sc->add_option("--signal", signal_file, "Signal JSON file")->required();
    val_sc->add_option("--tau-d", tau_d, "Average dwell time")->required();
    val_sc->add_option("--n0", n0, "Chatter bound")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }

    const Session s(g, out, err);
    try {
        if (*certify_sc) return s.certify_cmd();
        if (*dwell_sc) return s.dwell_cmd(ignore_warm);
        if (*sim_sc) return s.simulate_cmd(cert_file);
        if (*sweep_sc) return s.sweep_cmd(lo, hi, steps, param);
        return s.validate_cmd(signal_file, tau_d, n0);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace hyperswitch::cli
