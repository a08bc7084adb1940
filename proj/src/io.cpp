#include "hyperswitch/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hyperswitch/errors.hpp"

namespace hyperswitch {

namespace {

double number(const Json& j, const std::string& what) {
    if (!j.is_number()) throw ParseError(what + " must be a number");
    return j.get<double>();
}

const Json& field(const Json& j, const char* key, const std::string& what) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(what + ": missing field '" + key + "'");
    return j.at(key);
}

Vector vector_from_json(const Json& j, const std::string& what) {
    if (j.is_number()) return Vector::Constant(1, j.get<double>());
    if (!j.is_array()) throw ParseError(what + " must be an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = number(j[k], what);
    return v;
}

Json vector_to_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back(v(k));
    return a;
}

Mode mode_from_json(const Json& j, int n, int index) {
    const std::string what = "mode " + std::to_string(index);
    if (!j.is_object()) throw ParseError(what + " must be an object");
    if (j.contains("Lambda")) {
        const Json& lj = j.at("Lambda");
        Vector lambda;
        if (lj.is_array() && !lj.empty() && lj[0].is_array()) {
            lambda = matrix_from_json(lj, n, what + " Lambda").diagonal();
        } else {
            lambda = vector_from_json(lj, what + " Lambda");
        }
        if (lambda.size() != n) throw ParseError(what + " Lambda must have n entries");
        int m = 0;
        if (j.contains("m")) {
            if (!j.at("m").is_number_integer()) throw ParseError(what + " m must be an integer");
            m = j.at("m").get<int>();
        } else {
            m = static_cast<int>((lambda.array() < 0.0).count());
        }
        const Matrix f = j.contains("F") ? matrix_from_json(j.at("F"), n, what + " F") : Matrix(Matrix::Zero(n, n));
        const Matrix g = matrix_from_json(field(j, "G", what), n, what + " G");
        return mode_from_characteristic(lambda, m, f, g);
    }
    const Matrix l = matrix_from_json(field(j, "L", what), n, what + " L");
    const Matrix a = j.contains("A") ? matrix_from_json(j.at("A"), n, what + " A") : Matrix(Matrix::Zero(n, n));
    BoundaryPhysical bp{matrix_from_json(field(j, "B0", what), n, what + " B0"),
                        matrix_from_json(field(j, "B1", what), n, what + " B1")};
    return mode_from_physical(l, a, bp);
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Matrix matrix_from_json(const Json& j, int n, const std::string& what) {
    if (j.is_number()) {
        if (n != 1) throw ParseError(what + ": scalar given for a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
        return Matrix::Constant(1, 1, j.get<double>());
    }
    if (!j.is_array()) throw ParseError(what + " must be an array");
    Matrix m(n, n);
    if (!j.empty() && j[0].is_array()) {
        if (static_cast<int>(j.size()) != n) throw ParseError(what + " must have " + std::to_string(n) + " rows");
        for (int r = 0; r < n; ++r) {
            const Json& row = j[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                throw ParseError(what + " row " + std::to_string(r) + " must have " + std::to_string(n) + " entries");
            for (int c = 0; c < n; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], what);
        }
        return m;
    }
    if (static_cast<int>(j.size()) != n * n)
        throw ParseError(what + " must have " + std::to_string(n * n) + " entries (row-major)");
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) m(r, c) = number(j[static_cast<std::size_t>(r * n + c)], what);
    return m;
}

Json matrix_to_json(const Matrix& m) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        a.push_back(row);
    }
    return a;
}

SwitchedSystem system_from_json(const Json& j) {
    const Json& modes = field(j, "modes", "system");
    if (!modes.is_array() || modes.empty()) throw ParseError("system: 'modes' must be a non-empty array");
    int n = 0;
    if (j.contains("n")) {
        if (!j.at("n").is_number_integer() || j.at("n").get<int>() < 1) throw ParseError("system: n must be a positive integer");
        n = j.at("n").get<int>();
    } else {
        const Json& first = modes[0];
        const Json& probe = first.contains("Lambda") ? first.at("Lambda") : field(first, "L", "mode 0");
        n = probe.is_number() ? 1 : static_cast<int>(probe.size());
        if (!first.contains("Lambda") && !probe.empty() && !probe[0].is_array())
            n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(probe.size()))));
    }
    std::vector<Mode> out;
    for (std::size_t k = 0; k < modes.size(); ++k) out.push_back(mode_from_json(modes[k], n, static_cast<int>(k)));
    return SwitchedSystem(std::move(out));
}

Json system_to_json(const SwitchedSystem& sys) {
    Json modes = Json::array();
    for (const Mode& m : sys.modes()) {
        const BoundaryPhysical bp = m.to_physical_boundary();
        modes.push_back(Json{{"L", matrix_to_json(m.L())},
                             {"A", matrix_to_json(m.A())},
                             {"B0", matrix_to_json(bp.B0)},
                             {"B1", matrix_to_json(bp.B1)}});
    }
    return Json{{"n", sys.n()}, {"modes", modes}};
}

SwitchingSignal signal_from_json(const Json& j, int mode_count, std::uint64_t default_seed) {
    if (!j.is_object()) throw ParseError("signal must be an object");
    const double horizon = number(field(j, "horizon", "signal"), "signal horizon");
    SwitchingSignal s;
    if (j.contains("periodic")) {
        const Json& p = j.at("periodic");
        std::vector<int> cycle;
        if (p.contains("cycle")) {
            for (const Json& c : p.at("cycle")) cycle.push_back(c.get<int>());
        } else {
            for (int k = 0; k < std::max(mode_count, 1); ++k) cycle.push_back(k);
        }
        s = periodic_signal(number(field(p, "period", "periodic signal"), "period"), cycle, horizon);
    } else if (j.contains("random")) {
        const Json& r = j.at("random");
        const int modes = j.contains("modes") ? j.at("modes").get<int>() : mode_count;
        const std::uint64_t seed = r.contains("seed") ? r.at("seed").get<std::uint64_t>() : default_seed;
        s = random_dwell_signal(seed, number(field(r, "tau_D", "random signal"), "tau_D"),
                                r.contains("N0") ? r.at("N0").get<int>() : 1, horizon, modes,
                                j.contains("initial_mode") ? j.at("initial_mode").get<int>() : 0);
    } else {
        s.initial_mode = j.contains("initial_mode") ? j.at("initial_mode").get<int>() : 0;
        s.horizon = horizon;
        if (j.contains("switches")) {
            for (const Json& sw : j.at("switches")) {
                if (!sw.is_array() || sw.size() != 2) throw ParseError("each switch must be [time, mode]");
                s.switches.push_back({number(sw[0], "switch time"), sw[1].get<int>()});
            }
        }
    }
    try {
        s.validate(mode_count);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("signal: ") + e.what());
    }
    return s;
}

Json signal_to_json(const SwitchingSignal& s) {
    Json sw = Json::array();
    for (const Switch& x : s.switches) sw.push_back(Json::array({x.time, x.mode}));
    return Json{{"initial_mode", s.initial_mode}, {"switches", sw}, {"horizon", s.horizon}};
}

Json certificate_to_json(const Certificate& c) {
    Json q = Json::array();
    for (const Vector& v : c.Q) q.push_back(vector_to_json(v));
    Json margins = Json::array();
    for (const Margin& m : c.margins) margins.push_back(Json{{"label", m.label}, {"margin", m.value}});
    return Json{{"variant", to_string(c.variant)}, {"Q", q},        {"mu", c.mu},
                {"nu", c.nu},                      {"gamma", c.gamma}, {"tau_D", c.tau_D},
                {"margins", margins}};
}

Certificate certificate_from_json(const Json& j) {
    try {
        Certificate c;
        c.variant = variant_from_string(field(j, "variant", "certificate").get<std::string>());
        for (const Json& q : field(j, "Q", "certificate")) c.Q.push_back(vector_from_json(q, "certificate Q"));
        for (const Json& m : field(j, "mu", "certificate")) c.mu.push_back(number(m, "certificate mu"));
        c.nu = number(field(j, "nu", "certificate"), "nu");
        c.gamma = j.contains("gamma") ? number(j.at("gamma"), "gamma") : 1.0;
        c.tau_D = j.contains("tau_D") ? number(j.at("tau_D"), "tau_D") : 0.0;
        if (j.contains("margins"))
            for (const Json& m : j.at("margins")) c.margins.push_back({m.at("label").get<std::string>(), m.at("margin").get<double>()});
        return c;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("certificate: ") + e.what());
    }
}

SearchOptions search_options_from_json(const Json& j) {
    SearchOptions o;
    if (j.is_null()) return o;
    if (!j.is_object()) throw ParseError("search options must be an object");
    if (j.contains("mu_grid")) {
        const Json& g = j.at("mu_grid");
        if (g.is_array()) {
            o.mu_grid.clear();
            for (const Json& v : g) o.mu_grid.push_back(number(v, "mu_grid"));
        } else {
            o.mu_grid = SearchOptions::default_mu_grid(g.value("points", 41), g.value("lo", -3.0), g.value("hi", 3.0));
        }
        if (o.mu_grid.empty()) throw ParseError("mu_grid must not be empty");
    }
    if (j.contains("nu_lo")) o.nu_lo = number(j.at("nu_lo"), "nu_lo");
    if (j.contains("nu_hi")) o.nu_hi = number(j.at("nu_hi"), "nu_hi");
    if (j.contains("nu_iters")) o.nu_iters = j.at("nu_iters").get<int>();
    if (j.contains("nu_min")) o.nu_min = number(j.at("nu_min"), "nu_min");
    if (j.contains("tol_feas")) o.tol_feas = number(j.at("tol_feas"), "tol_feas");
    if (j.contains("max_feas_iters")) o.max_feas_iters = j.at("max_feas_iters").get<int>();
    if (j.contains("refine_mu")) o.refine_mu = j.at("refine_mu").get<bool>();
    if (j.contains("mu_tol")) o.mu_tol = number(j.at("mu_tol"), "mu_tol");
    if (j.contains("gamma")) o.gamma = number(j.at("gamma"), "gamma");
    if (j.contains("shared_mu")) o.shared_mu = j.at("shared_mu").get<bool>();
    if (j.contains("fixed_mu")) {
        std::vector<double> mu;
        for (const Json& v : j.at("fixed_mu")) mu.push_back(number(v, "fixed_mu"));
        o.fixed_mu = mu;
    }
    if (j.contains("x_check")) {
        const Json& x = j.at("x_check");
        const std::string kind = x.value("kind", "grid");
        if (kind != "grid" && kind != "interval") throw ParseError("x_check kind must be 'grid' or 'interval'");
        o.x_check = kind == "grid" ? XCheck::grid(x.value("n_x", 65)) : XCheck::interval(x.value("n_x", 65));
        if (o.x_check.n_x < 2) throw ParseError("x_check n_x must be at least 2");
    }
    return o;
}

ScenarioConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    try {
        ScenarioConfig c;
        if (j.contains("system")) {
            c.system = system_from_json(j.at("system"));
        } else if (j.contains("system_file")) {
            c.system = system_from_json(read_json_file(base_dir / j.at("system_file").get<std::string>()));
        }
        if (j.contains("variant")) c.variant = variant_from_string(j.at("variant").get<std::string>());
        if (j.contains("search")) c.search = search_options_from_json(j.at("search"));
        if (j.contains("signal")) c.signal = j.at("signal");
        if (j.contains("grid")) {
            const Json& g = j.at("grid");
            c.grid.n_x = g.value("n_x", c.grid.n_x);
            c.grid.cfl = g.value("cfl", c.grid.cfl);
            c.grid.stride = g.value("stride", c.grid.stride);
        }
        if (j.contains("initial") && c.system) {
            const Json& w = j.at("initial");
            if (!(w.is_string() && w.get<std::string>() == "sin")) {
                Matrix m(c.system->n(), c.grid.n_x);
                if (!w.is_array() || static_cast<int>(w.size()) != c.system->n())
                    throw ParseError("initial profile must have one row per component");
                for (int r = 0; r < c.system->n(); ++r) {
                    const Vector row = vector_from_json(w[static_cast<std::size_t>(r)], "initial profile");
                    if (row.size() != c.grid.n_x) throw ParseError("initial profile rows must have n_x entries");
                    m.row(r) = row.transpose();
                }
                c.initial = m;
            }
        }
        if (j.contains("warm_start")) {
            const Json& w = j.at("warm_start");
            WarmStart ws;
            for (const Json& q : field(w, "Q", "warm_start")) ws.Q.push_back(vector_from_json(q, "warm_start Q"));
            for (const Json& m : field(w, "mu", "warm_start")) ws.mu.push_back(number(m, "warm_start mu"));
            if (w.contains("nu")) ws.nu = number(w.at("nu"), "warm_start nu");
            c.warm_start = ws;
        }
        if (j.contains("sweep")) {
            const Json& s = j.at("sweep");
            c.sweep = SweepSpec{s.value("param", "period"), s.value("lo", 0.0), s.value("hi", 0.0), s.value("steps", 0)};
        }
        if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
        return c;
    } catch (const Json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    return config_from_json(read_json_file(path), path.parent_path());
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    // max_digits10 round-trips every double.
    out << j.dump(2) << "\n";
}

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,l2,V,mode\n";
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        const double v = k < trace.lyap.size() ? trace.lyap[k] : std::nan("");
        out << format_double(trace.times[k]) << ',' << format_double(trace.l2[k]) << ','
            << (std::isnan(v) ? std::string() : format_double(v)) << ',' << trace.mode[k] << '\n';
    }
}

void write_state_csv(const std::filesystem::path& path, const Trace& trace, std::size_t k) {
    if (k >= trace.states.size()) throw std::out_of_range("no stored state for that sample");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const Matrix& w = trace.states[k];
    out << 'x';
    for (Eigen::Index r = 0; r < w.rows(); ++r) out << ",w" << r;
    out << '\n';
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
        out << format_double(trace.x(j));
        for (Eigen::Index r = 0; r < w.rows(); ++r) out << ',' << format_double(w(r, j));
        out << '\n';
    }
}

std::string trace_svg(const Trace& trace, const std::string& title) {
    constexpr double width = 720.0, height = 420.0, left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;
    const double t_max = trace.times.empty() ? 1.0 : std::max(trace.times.back(), 1e-12);
    auto positive_log = [](double v) { return v > 0.0 ? std::log10(v) : std::nan(""); };

    std::vector<std::pair<std::string, std::vector<double>>> series{{"l2", trace.l2}};
    if (trace.lyap.size() == trace.times.size()) series.push_back({"V", trace.lyap});
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : series)
        for (double v : s.second) {
            const double l = positive_log(v);
            if (std::isfinite(l)) {
                lo = std::min(lo, l);
                hi = std::max(hi, l);
            }
        }
    if (!std::isfinite(lo)) lo = -1.0, hi = 1.0;
    if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
    const double pw = width - left - right, ph = height - top - bottom;
    auto px = [&](double t) { return left + pw * t / t_max; };
    auto py = [&](double l) { return top + ph * (hi - l) / (hi - lo); };

    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double t = t_max * k / 4.0;
        const double l = lo + (hi - lo) * k / 4.0;
        s << "<text x=\"" << px(t) << "\" y=\"" << height - bottom + 18 << "\" text-anchor=\"middle\">" << t << "</text>\n";
        s << "<text x=\"" << left - 6 << "\" y=\"" << py(l) + 4 << "\" text-anchor=\"end\">1e" << std::round(l * 10) / 10
          << "</text>\n";
    }
    s << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">t</text>\n";
    const char* colors[] = {"#1f77b4", "#d62728"};
    for (std::size_t i = 0; i < series.size(); ++i) {
        s << "<polyline fill=\"none\" stroke=\"" << colors[i % 2] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < trace.times.size(); ++k) {
            const double l = positive_log(series[i].second[k]);
            if (std::isfinite(l)) s << px(trace.times[k]) << ',' << py(l) << ' ';
        }
        s << "\"/>\n";
        s << "<text x=\"" << left + pw - 40 << "\" y=\"" << top + 16 + 16 * static_cast<double>(i) << "\" fill=\""
          << colors[i % 2] << "\">" << series[i].first << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace hyperswitch
