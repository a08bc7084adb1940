#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "constraints.hpp"
#include "hyperswitch/certifier.hpp"
#include "hyperswitch/errors.hpp"

namespace hyperswitch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LmiSettings lmi_settings(const SearchOptions& o, bool decide_only) {
    LmiSettings s;
    s.tol_feas = o.tol_feas;
    s.max_iters = o.max_feas_iters;
    s.decide_only = decide_only;
    return s;
}

FeasStatus to_feas(LmiStatus s) {
    switch (s) {
        case LmiStatus::Feasible: return FeasStatus::Feasible;
        case LmiStatus::StructuralInfeasible: return FeasStatus::StructuralInfeasible;
        default: return FeasStatus::Infeasible;
    }
}

template <class F>
void parallel_for(int count, int jobs, F&& body) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

double grid_spacing(std::vector<double> grid) {
    std::sort(grid.begin(), grid.end());
    double h = kInf;
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (grid[k] > grid[k - 1]) h = std::min(h, grid[k] - grid[k - 1]);
    return std::isfinite(h) ? h : 0.5;
}

std::vector<double> forced_mu(const SwitchedSystem& sys, Variant variant, const SearchOptions& o) {
    if (variant == Variant::MuZero || variant == Variant::CommonSignFree)
        return std::vector<double>(static_cast<std::size_t>(sys.size()), 0.0);
    if (o.fixed_mu) return detail::expand_mu(sys, *o.fixed_mu);
    return {};
}

class Searcher {
public:
    Searcher(const SwitchedSystem& sys, Variant variant, const SearchOptions& o)
        : sys_(sys), variant_(variant), o_(o) {}

    double nu_hi(const std::vector<double>& mu) const {
        if (o_.nu_hi) return *o_.nu_hi;
        double f = 0.0, m = 0.0, s = 0.0;
        for (int i = 0; i < sys_.size(); ++i) {
            f = std::max(f, sys_.mode(i).F().operatorNorm());
            s = std::max(s, sys_.mode(i).max_speed());
        }
        for (double v : mu) m = std::max(m, std::abs(v));
        return f + m * s + 1.0;
    }

    bool feasible(const std::vector<double>& mu, double nu, double gamma, double* margin = nullptr) const {
        const LmiProblem p = detail::build_problem(sys_, variant_, mu, nu, gamma, o_.x_check);
        const LmiResult r = solve_lmi(p, lmi_settings(o_, margin == nullptr));
        if (margin) *margin = r.margin;
        return r.status == LmiStatus::Feasible;
    }

    /// Largest nu with the coupled problem feasible at (mu, gamma), or 0.
    /// `margin` receives the best margin at nu_min.
    double nu_max(const std::vector<double>& mu, double gamma, double* margin, double hi_cap = kInf) const {
        const double lo0 = std::max(o_.nu_lo, o_.nu_min);
        double m = 0.0;
        if (!feasible(mu, lo0, gamma, &m)) {
            if (margin) *margin = m;
            return 0.0;
        }
        if (margin) *margin = m;
        double lo = lo0;
        double hi = std::min(nu_hi(mu), hi_cap);
        if (hi <= lo) return lo;
        if (std::isfinite(hi_cap) && feasible(mu, hi, gamma)) return hi;
        for (int it = 0; it < o_.nu_iters; ++it) {
            const double mid = 0.5 * (lo + hi);
            (feasible(mu, mid, gamma) ? lo : hi) = mid;
        }
        return lo;
    }

    /// Single-mode nu_max for dwell variants (cached per mode and mu).
    double single_nu(int mode, double mu) {
        {
            std::lock_guard<std::mutex> lock(cache_mutex_);
            auto it = single_cache_.find({mode, mu});
            if (it != single_cache_.end()) return it->second;
        }
        const double lo0 = std::max(o_.nu_lo, o_.nu_min);
        auto ok = [&](double nu) {
            const LmiProblem p = detail::build_single_mode_problem(sys_, variant_, mode, mu, nu, o_.x_check);
            return solve_lmi(p, lmi_settings(o_, true)).status == LmiStatus::Feasible;
        };
        double result = 0.0;
        if (ok(lo0)) {
            double lo = lo0;
            double hi = nu_hi({mu});
            for (int it = 0; it < o_.nu_iters; ++it) {
                const double mid = 0.5 * (lo + hi);
                (ok(mid) ? lo : hi) = mid;
            }
            result = lo;
        }
        std::lock_guard<std::mutex> lock(cache_mutex_);
        single_cache_[{mode, mu}] = result;
        return result;
    }

    CertifyResult finish(std::vector<double> mu, double nu, double gamma) const {
        CertifyResult out;
        out.best_mu = mu;
        for (int attempt = 0; attempt < 8; ++attempt) {
            const LmiProblem p = detail::build_problem(sys_, variant_, mu, nu, gamma, o_.x_check);
            const LmiResult r = solve_lmi(p, lmi_settings(o_, false));
            if (r.status == LmiStatus::Feasible) {
                Certificate c = make_certificate(sys_, variant_, detail::split_weights(sys_, r.q), mu, nu, o_);
                const AuditReport rep = check_certificate(sys_, c, o_);
                if (rep.passed) {
                    out.feasible = true;
                    out.best_margin = r.margin;
                    out.certificate = std::move(c);
                    return out;
                }
            }
            nu *= 0.999;
            if (nu < o_.nu_min) break;
        }
        return out;
    }

    // ---- shared mu: maximize nu over a scalar mu --------------------------

    struct Point {
        double mu = 0.0;
        double nu = 0.0;
        double margin = -kInf;
    };

    static bool better(const Point& a, const Point& b) {
        if ((a.nu > 0.0) != (b.nu > 0.0)) return a.nu > 0.0;
        if (a.nu > 0.0) {
            if (a.nu > b.nu * (1.0 + 1e-12) + 1e-15) return true;
            if (b.nu > a.nu * (1.0 + 1e-12) + 1e-15) return false;
        } else {
            if (a.margin > b.margin + 1e-15) return true;
            if (b.margin > a.margin + 1e-15) return false;
        }
        if (std::abs(a.mu) != std::abs(b.mu)) return std::abs(a.mu) < std::abs(b.mu);
        return a.mu < b.mu;
    }

    Point eval_shared(double mu, double gamma) const {
        Point p{mu, 0.0, -kInf};
        const std::vector<double> mus(static_cast<std::size_t>(sys_.size()), mu);
        p.nu = nu_max(mus, gamma, &p.margin);
        return p;
    }

    Point best_of(const std::vector<double>& mus, double gamma, Point best) const {
        std::vector<Point> pts(mus.size());
        parallel_for(static_cast<int>(mus.size()), o_.jobs,
                     [&](int k) { pts[static_cast<std::size_t>(k)] = eval_shared(mus[static_cast<std::size_t>(k)], gamma); });
        for (const Point& p : pts)
            if (better(p, best)) best = p;
        return best;
    }

    CertifyResult search_shared(double gamma) const {
        Point best = best_of(o_.mu_grid, gamma, Point{0.0, 0.0, -kInf});
        if (o_.refine_mu) {
            double h = grid_spacing(o_.mu_grid);
            while (h > o_.mu_tol) {
                std::vector<double> local;
                for (int k = -5; k <= 5; ++k)
                    if (k != 0) local.push_back(best.mu + k * h / 5.0);
                best = best_of(local, gamma, best);
                h /= 5.0;
            }
        }
        const std::vector<double> mus(static_cast<std::size_t>(sys_.size()), best.mu);
        if (best.nu <= 0.0) {
            CertifyResult out;
            out.best_margin = best.margin;
            out.best_mu = mus;
            return out;
        }
        return finish(mus, best.nu, gamma);
    }

    // ---- dwell variants: minimize tau_D over the mu tuple ---------------

    struct Eval {
        double tau = kInf;
        double nu = 0.0;
        double gamma = 1.0;
    };

    Eval evaluate_tuple(const std::vector<double>& mu, double best_tau) {
        Eval e;
        double nu_star = kInf;
        for (int i = 0; i < sys_.size(); ++i) nu_star = std::min(nu_star, single_nu(i, mu[static_cast<std::size_t>(i)]));
        if (!(nu_star >= o_.nu_min)) return e;
        const double spread = dwell_time_bound(variant_, 1.0, 1.0, mu);  // Delta term times nu

        if (o_.gamma) {
            const double g = *o_.gamma;
            if (spread / nu_star >= best_tau) return e;
            const double nu = nu_max(mu, g, nullptr, nu_star);
            if (nu <= 0.0) return e;
            e.nu = nu;
            e.gamma = g;
            e.tau = dwell_time_bound(variant_, g, nu, mu);
            return e;
        }

        for (double frac : {1.0, 0.75, 0.5}) {
            const double nu = nu_star * frac;
            if (nu < o_.nu_min) break;
            const double floor_tau = spread / nu;
            if (floor_tau >= std::min(best_tau, e.tau)) continue;
            if (feasible(mu, nu, 1.0)) {
                e = {floor_tau, nu, 1.0};
                break;
            }
            const double cap_tau = std::min(best_tau, e.tau);
            const double log_cap = std::isfinite(cap_tau) ? std::min(2.0 * nu * (cap_tau - floor_tau), 40.0) : 40.0;
            if (!(log_cap > 0.0) || !feasible(mu, nu, std::exp(log_cap))) continue;
            double lo = 0.0;
            double hi = log_cap;
            for (int it = 0; it < 24; ++it) {
                const double mid = 0.5 * (lo + hi);
                (feasible(mu, nu, std::exp(mid)) ? hi : lo) = mid;
            }
            const double tau = dwell_time_bound(variant_, std::exp(hi), nu, mu);
            if (tau < e.tau) e = {tau, nu, std::exp(hi)};
        }
        return e;
    }

    CertifyResult search_dwell() {
        const int modes = sys_.size();
        std::vector<std::vector<double>> tuples;
        const std::vector<double> fixed = forced_mu(sys_, variant_, o_);
        if (!fixed.empty()) {
            tuples.push_back(fixed);
        } else if (o_.shared_mu || modes == 1) {
            for (double m : o_.mu_grid) tuples.push_back(std::vector<double>(static_cast<std::size_t>(modes), m));
        } else {
            const double total = std::pow(static_cast<double>(o_.mu_grid.size()), modes);
            if (total <= 20000.0) {
                std::vector<std::size_t> idx(static_cast<std::size_t>(modes), 0);
                while (true) {
                    std::vector<double> t;
                    for (std::size_t k : idx) t.push_back(o_.mu_grid[k]);
                    tuples.push_back(std::move(t));
                    std::size_t d = 0;
                    while (d < idx.size() && ++idx[d] == o_.mu_grid.size()) idx[d++] = 0;
                    if (d == idx.size()) break;
                }
            } else {
                for (double m : o_.mu_grid) tuples.push_back(std::vector<double>(static_cast<std::size_t>(modes), m));
            }
        }

        // Stage 1: single-mode rates on every grid value.
        std::vector<std::pair<int, double>> jobs;
        for (int i = 0; i < modes; ++i)
            for (const auto& t : tuples) jobs.emplace_back(i, t[static_cast<std::size_t>(i)]);
        std::sort(jobs.begin(), jobs.end());
        jobs.erase(std::unique(jobs.begin(), jobs.end()), jobs.end());
        parallel_for(static_cast<int>(jobs.size()), o_.jobs, [&](int k) {
            single_nu(jobs[static_cast<std::size_t>(k)].first, jobs[static_cast<std::size_t>(k)].second);
        });

        // Stage 2: tuples ordered by the gamma-free lower bound on tau_D.
        struct Cand {
            double lb;
            std::vector<double> mu;
        };
        std::vector<Cand> cands;
        for (const auto& t : tuples) {
            double nu_star = kInf;
            for (int i = 0; i < modes; ++i) nu_star = std::min(nu_star, single_nu(i, t[static_cast<std::size_t>(i)]));
            if (!(nu_star >= o_.nu_min)) continue;
            cands.push_back({dwell_time_bound(variant_, 1.0, nu_star, t), t});
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
            if (a.lb != b.lb) return a.lb < b.lb;
            double sa = 0.0, sb = 0.0;
            for (double v : a.mu) sa += std::abs(v);
            for (double v : b.mu) sb += std::abs(v);
            return sa < sb;
        });

        std::vector<double> best_mu;
        Eval best;
        int evaluated = 0;
        for (const Cand& c : cands) {
            if (c.lb >= best.tau || evaluated >= 64) break;
            ++evaluated;
            const Eval e = evaluate_tuple(c.mu, best.tau);
            if (e.tau < best.tau) {
                best = e;
                best_mu = c.mu;
            }
        }

        if (best_mu.empty() && fixed.empty() && o_.refine_mu) {
            // No grid tuple works: zoom on the single-mode rates around shared mu.
            const Point p = search_shared_point();
            if (p.nu > 0.0) {
                std::vector<double> t(static_cast<std::size_t>(modes), p.mu);
                const Eval e = evaluate_tuple(t, kInf);
                if (e.tau < kInf) {
                    best = e;
                    best_mu = t;
                }
            }
        }
        if (best_mu.empty()) {
            CertifyResult out;
            out.best_mu = fixed.empty() ? std::vector<double>(static_cast<std::size_t>(modes), 0.0) : fixed;
            return out;
        }

        // Stage 3: pattern search on the tuple.
        if (fixed.empty() && o_.refine_mu) {
            double h = 0.5 * grid_spacing(o_.mu_grid);
            const bool joint_only = o_.shared_mu || modes == 1;
            int rounds = 0;
            while (h >= o_.mu_tol && rounds++ < 400) {
                std::vector<std::vector<double>> moves;
                for (double s : {1.0, -1.0}) {
                    std::vector<double> t = best_mu;
                    for (double& v : t) v += s * h;
                    moves.push_back(t);
                    if (joint_only) continue;
                    for (int i = 0; i < modes; ++i) {
                        std::vector<double> u = best_mu;
                        u[static_cast<std::size_t>(i)] += s * h;
                        moves.push_back(u);
                    }
                }
                bool improved = false;
                for (const auto& t : moves) {
                    const Eval e = evaluate_tuple(t, best.tau);
                    if (e.tau < best.tau - 1e-12) {
                        best = e;
                        best_mu = t;
                        improved = true;
                        break;
                    }
                }
                if (!improved) h *= 0.5;
            }
        }
        return finish(best_mu, best.nu, best.gamma);
    }

    Point search_shared_point() {
        // Zoom on min_i single_nu(i, mu) over a shared mu.
        auto eval = [&](double mu) {
            Point p{mu, kInf, -kInf};
            for (int i = 0; i < sys_.size(); ++i) p.nu = std::min(p.nu, single_nu(i, mu));
            return p;
        };
        Point best{0.0, 0.0, -kInf};
        for (double m : o_.mu_grid) {
            const Point p = eval(m);
            if (better(p, best)) best = p;
        }
        double h = grid_spacing(o_.mu_grid);
        while (h > o_.mu_tol) {
            for (int k = -5; k <= 5; ++k) {
                if (k == 0) continue;
                const Point p = eval(best.mu + k * h / 5.0);
                if (better(p, best)) best = p;
            }
            h /= 5.0;
        }
        return best;
    }

    CertifyResult run() {
        if (is_dwell_variant(variant_)) return search_dwell();
        const std::vector<double> fixed = forced_mu(sys_, variant_, o_);
        if (!fixed.empty()) {
            double margin = 0.0;
            const double nu = nu_max(fixed, 1.0, &margin);
            if (nu <= 0.0) {
                CertifyResult out;
                out.best_margin = margin;
                out.best_mu = fixed;
                return out;
            }
            return finish(fixed, nu, 1.0);
        }
        return search_shared(1.0);
    }

private:
    const SwitchedSystem& sys_;
    Variant variant_;
    const SearchOptions& o_;
    std::map<std::pair<int, double>, double> single_cache_;
    std::mutex cache_mutex_;
};

}  // namespace

FeasibilityResult feasibility_fixed(const SwitchedSystem& sys, Variant variant, const std::vector<double>& mu_in,
                                    double nu, const SearchOptions& options, double gamma, bool decide_only) {
    detail::require_variant_structure(sys, variant);
    std::vector<double> mu = detail::expand_mu(sys, mu_in);
    if (variant == Variant::MuZero || variant == Variant::CommonSignFree) std::fill(mu.begin(), mu.end(), 0.0);
    if (!(gamma >= 1.0)) throw PreconditionViolated("gamma must be at least 1");
    const LmiProblem p = detail::build_problem(sys, variant, mu, nu, gamma, options.x_check);
    const LmiResult r = solve_lmi(p, lmi_settings(options, decide_only));
    FeasibilityResult out;
    out.status = to_feas(r.status);
    out.margin = r.margin;
    if (r.q.size() == p.num_vars) out.Q = detail::split_weights(sys, r.q);
    return out;
}

CertifyResult certify(const SwitchedSystem& sys, Variant variant, const SearchOptions& options) {
    detail::require_variant_structure(sys, variant);
    if (options.mu_grid.empty()) throw std::invalid_argument("mu grid must not be empty");
    if (options.x_check.n_x < 2) throw std::invalid_argument("x check needs at least 2 points");
    if (options.gamma && !(*options.gamma >= 1.0)) throw PreconditionViolated("gamma must be at least 1");
    Searcher s(sys, variant, options);
    return s.run();
}

}  // namespace hyperswitch
