#include "hyperswitch/simulator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "constraints.hpp"
#include "hyperswitch/errors.hpp"

namespace hyperswitch {

void GridSpec::validate() const {
    if (n_x < 3) throw std::invalid_argument("grid needs at least 3 points");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw std::invalid_argument("cfl must lie in (0, 1]");
    if (stride < 1) throw std::invalid_argument("stride must be positive");
}

double trapezoid(const Vector& v) {
    const Eigen::Index n = v.size();
    if (n < 2) return 0.0;
    const double h = 1.0 / static_cast<double>(n - 1);
    return h * (v.sum() - 0.5 * (v(0) + v(n - 1)));
}

Matrix default_initial_profile(int n, int n_x) {
    Matrix w(n, n_x);
    for (int j = 0; j < n_x; ++j) w.col(j).setConstant(std::sin(2.0 * std::numbers::pi * j / (n_x - 1)));
    return w;
}

namespace {

double l2_norm(const Matrix& w) { return std::sqrt(trapezoid(w.colwise().squaredNorm().transpose())); }

class Stepper {
public:
    Stepper(const Mode& mode, double dx) : mode_(mode), dx_(dx) {}

    void step(Matrix& y, double dt) const {
        const int n = mode_.n();
        const auto nx = y.cols();
        Matrix next = y;
        for (int k = 0; k < n; ++k) {
            const double lam = mode_.lambda()(k);
            const double c = lam * dt / dx_;
            if (std::abs(c) > 1.0 + 1e-12)
                throw CflViolation("Courant number " + std::to_string(std::abs(c)) + " exceeds 1");
            if (lam > 0.0) {
                for (Eigen::Index j = 1; j < nx; ++j) next(k, j) = y(k, j) - c * (y(k, j) - y(k, j - 1));
            } else {
                for (Eigen::Index j = 0; j + 1 < nx; ++j) next(k, j) = y(k, j) - c * (y(k, j + 1) - y(k, j));
            }
        }
        // Source applied to the transported state (Lie splitting).
        next += dt * (mode_.F() * next);
        close_boundary(next);
        y.swap(next);
    }

    void close_boundary(Matrix& y) const {
        const int n = mode_.n();
        const int m = mode_.m();
        const auto last = y.cols() - 1;
        Vector out(n);
        out.head(m) = y.col(0).head(m);
        out.tail(n - m) = y.col(last).tail(n - m);
        const Vector in = mode_.G() * out;
        y.col(last).head(m) = in.head(m);
        y.col(0).tail(n - m) = in.tail(n - m);
    }

private:
    const Mode& mode_;
    double dx_;
};

}  // namespace

Trace simulate(const SwitchedSystem& sys, const SwitchingSignal& signal, const Matrix& w0, const GridSpec& grid) {
    grid.validate();
    signal.validate(sys.size());
    if (w0.rows() != sys.n() || w0.cols() != grid.n_x)
        throw DimensionMismatch("initial profile must be n x n_x");
    if (!(signal.horizon > 0.0)) throw std::invalid_argument("signal horizon must be positive");

    Trace tr;
    tr.x = Vector::LinSpaced(grid.n_x, 0.0, 1.0);
    const double dx = grid.dx();

    int mode = signal.initial_mode;
    Matrix y = sys.mode(mode).S() * w0;

    auto record = [&](double t, int prev) {
        const Matrix w = sys.mode(mode).S_inv() * y;
        tr.times.push_back(t);
        tr.l2.push_back(l2_norm(w));
        tr.mode.push_back(mode);
        tr.prev_mode.push_back(prev);
        if (grid.keep_states) tr.states.push_back(w);
    };
    record(0.0, mode);

    double t = 0.0;
    long steps = 0;
    std::size_t next_switch = 0;
    while (true) {
        const double t_end =
            next_switch < signal.switches.size() ? signal.switches[next_switch].time : signal.horizon;
        const Mode& md = sys.mode(mode);
        const double dt_nominal = grid.cfl * dx / md.max_speed();
        const auto n_steps = static_cast<long>(std::ceil((t_end - t) / dt_nominal - 1e-9));
        const double dt = n_steps > 0 ? (t_end - t) / static_cast<double>(n_steps) : 0.0;
        const Stepper stepper(md, dx);
        const double t_start = t;
        for (long s = 1; s <= n_steps; ++s) {
            stepper.step(y, dt);
            ++steps;
            t = s == n_steps ? t_end : t_start + static_cast<double>(s) * dt;
            if (s < n_steps && steps % grid.stride == 0) record(t, mode);
        }
        t = t_end;
        if (next_switch >= signal.switches.size()) {
            record(t, mode);
            break;
        }
        const int prev = mode;
        mode = signal.switches[next_switch].mode;
        y = sys.mode(mode).S() * (md.S_inv() * y);
        record(t, prev);
        ++next_switch;
    }

    try {
        tr.fit = estimate_decay(tr);
    } catch (const DegenerateWindow&) {
        tr.fit.reset();
    }
    return tr;
}

Trace lyapunov_trace(Trace trace, const SwitchedSystem& sys, const Certificate& cert) {
    const int modes = sys.size();
    if (static_cast<int>(cert.Q.size()) != modes || static_cast<int>(cert.mu.size()) != modes)
        throw CertificateMismatch("certificate does not match the number of modes");
    for (const Vector& q : cert.Q)
        if (q.size() != sys.n()) throw CertificateMismatch("certificate weights do not match the state dimension");
    if (trace.states.size() != trace.times.size())
        throw CertificateMismatch("trace has no stored states");

    const Eigen::Index nx = trace.x.size();
    // Per-mode weight at every grid point.
    std::vector<std::vector<Matrix>> weight(static_cast<std::size_t>(modes));
    for (int i = 0; i < modes; ++i) {
        const Mode& md = sys.mode(i);
        const Vector& q = cert.Q[static_cast<std::size_t>(i)];
        const Matrix mm = detail::weight_minus(md, q);
        const Matrix mp = detail::weight_plus(md, q);
        const double mu = cert.mu[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < nx; ++j) {
            const double x = trace.x(j);
            weight[static_cast<std::size_t>(i)].push_back(std::exp(2.0 * mu * x) * mm + std::exp(-2.0 * mu * x) * mp);
        }
    }
    auto value = [&](const Matrix& w, int mode) {
        Vector dens(nx);
        for (Eigen::Index j = 0; j < nx; ++j)
            dens(j) = w.col(j).dot(weight[static_cast<std::size_t>(mode)][static_cast<std::size_t>(j)] * w.col(j));
        return trapezoid(dens);
    };
    trace.lyap.clear();
    trace.lyap_left.clear();
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        trace.lyap.push_back(value(trace.states[k], trace.mode[k]));
        trace.lyap_left.push_back(trace.is_switch(k) ? value(trace.states[k], trace.prev_mode[k]) : trace.lyap.back());
    }
    return trace;
}

DecayFit estimate_decay(const Trace& trace, std::optional<double> t0, std::optional<double> t1) {
    if (trace.times.empty()) throw DegenerateWindow("empty trace");
    const double end = trace.times.back();
    DecayFit fit;
    fit.t0 = t0.value_or(0.5 * end);
    fit.t1 = t1.value_or(end);
    std::vector<double> ts, ls;
    bool zero = false;
    for (std::size_t k = 0; k < trace.times.size(); ++k) {
        const double t = trace.times[k];
        if (t < fit.t0 || t > fit.t1) continue;
        if (!(trace.l2[k] > 0.0)) zero = true;
        ts.push_back(t);
        ls.push_back(trace.l2[k] > 0.0 ? std::log(trace.l2[k]) : 0.0);
    }
    fit.samples = static_cast<int>(ts.size());
    if (fit.samples < 8) throw DegenerateWindow("fit window holds " + std::to_string(fit.samples) + " samples, need 8");
    if (zero) {
        fit.zero_norm = true;
        fit.rate = -std::numeric_limits<double>::infinity();
        fit.C = 0.0;
        return fit;
    }
    const auto n = static_cast<double>(ts.size());
    double mt = 0.0, ml = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        mt += ts[k];
        ml += ls[k];
    }
    mt /= n;
    ml /= n;
    double stt = 0.0, stl = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        stt += (ts[k] - mt) * (ts[k] - mt);
        stl += (ts[k] - mt) * (ls[k] - ml);
    }
    const double slope = stt > 0.0 ? stl / stt : 0.0;
    const double intercept = ml - slope * mt;
    double ss = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        const double r = ls[k] - (intercept + slope * ts[k]);
        ss += r * r;
    }
    fit.rate = -slope;
    fit.C = std::exp(intercept);
    fit.residual = std::sqrt(ss / n);
    return fit;
}

}  // namespace hyperswitch
