#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hyperswitch/certifier.hpp"
#include "hyperswitch/core_model.hpp"

namespace hs_test {

using hyperswitch::Matrix;
using hyperswitch::Vector;

// Hand-rolled generators: everything is driven by one seeded engine.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

    Matrix matrix(int r, int c, double scale = 1.0) {
        Matrix m(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) m(i, j) = uniform(-scale, scale);
        return m;
    }

    Matrix symmetric(int n, double scale = 1.0) {
        const Matrix a = matrix(n, n, scale);
        return 0.5 * (a + a.transpose());
    }

    // Well conditioned: identity plus a bounded perturbation.
    Matrix invertible(int n) {
        Matrix s;
        do {
            s = Matrix::Identity(n, n) + matrix(n, n, 0.45);
        } while (std::abs(s.determinant()) < 0.2);
        return s;
    }

    // Distinct nonzero speeds, gaps at least 0.1, magnitudes in [0.2, 3].
    Vector speeds(int n, int negatives) {
        Vector v(n);
        for (;;) {
            for (int k = 0; k < n; ++k) v(k) = (k < negatives ? -1.0 : 1.0) * uniform(0.2, 3.0);
            std::vector<double> s(v.data(), v.data() + n);
            std::sort(s.begin(), s.end());
            bool ok = true;
            for (int k = 0; k + 1 < n; ++k) ok = ok && s[static_cast<std::size_t>(k + 1)] - s[static_cast<std::size_t>(k)] > 0.1;
            if (ok) return v;
        }
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline Vector sorted_speeds(Vector v) {
    std::sort(v.data(), v.data() + v.size(), [](double a, double b) {
        if ((a < 0.0) != (b < 0.0)) return a < 0.0;
        return a < b;
    });
    return v;
}

inline hyperswitch::Mode characteristic_mode(Gen& g, int n, int m, double f_scale, double g_scale) {
    return hyperswitch::mode_from_characteristic(sorted_speeds(g.speeds(n, m)), m, g.matrix(n, n, f_scale),
                                                 g.matrix(n, n, g_scale));
}

inline hyperswitch::Mode diag_mode(const Vector& lambda, int m, const Matrix& f, const Matrix& gm) {
    return hyperswitch::mode_from_characteristic(lambda, m, f, gm);
}

inline Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

inline Matrix mat2(double a, double b, double c, double d) {
    Matrix m(2, 2);
    m << a, b, c, d;
    return m;
}

inline Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }
inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index k = 0;
    for (double x : v) out(k++) = x;
    return out;
}

// Example A: wave equation split with switching reflections.
inline hyperswitch::SwitchedSystem example_a(double damping) {
    const Vector lambda = vec({-1.0, 1.0});
    const Matrix f = diag2(-damping, -damping);
    return hyperswitch::SwitchedSystem({diag_mode(lambda, 1, f, mat2(0, -1.2, 0.6, 0)),
                                        diag_mode(lambda, 1, f, mat2(0, -0.6, 1.2, 0))});
}

// Example B: scalar transport whose direction flips with the mode.
inline hyperswitch::SwitchedSystem example_b(double f, double gain) {
    return hyperswitch::SwitchedSystem({diag_mode(vec({1.0}), 0, scalar(f), scalar(gain)),
                                        diag_mode(vec({-1.0}), 1, scalar(f), scalar(gain))});
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace hs_test
