#include "hyperswitch/densela.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hyperswitch/errors.hpp"

namespace hyperswitch {

namespace {

constexpr int kMaxSweeps = 100;

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (Eigen::Index c = 0; c < a.cols(); ++c)
        for (Eigen::Index r = 0; r < a.rows(); ++r)
            if (r != c) s += a(r, c) * a(r, c);
    return std::sqrt(s);
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionMismatch("SymMatrix: matrix is not square");
    const double scale = max_abs(m);
    const double asym = max_abs(m - m.transpose());
    if (asym > 1e-12 * scale) {
        throw std::invalid_argument("SymMatrix: asymmetry " + std::to_string(asym) +
                                    " exceeds 1e-12 relative");
    }
    m_ = 0.5 * (m + m.transpose());
}

SymMatrix::SymMatrix(const Matrix& m, Trusted) : m_(0.5 * (m + m.transpose())) {}

SymMatrix SymMatrix::trusted(const Matrix& m) { return SymMatrix(m, Trusted{}); }

SymEig sym_eig(const SymMatrix& sym) {
    const Eigen::Index n = sym.size();
    if (n < 1) throw DimensionMismatch("sym_eig: empty matrix");

    Matrix a = sym.matrix();
    Matrix v = Matrix::Identity(n, n);
    const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

    int sweep = 0;
    for (; sweep < kMaxSweeps; ++sweep) {
        if (off_diagonal_norm(a) <= 1e-15 * scale) break;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                // Rotation angle zeroing a(p,q); Rutishauser's stable form.
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (sweep == kMaxSweeps) {
        const double off = off_diagonal_norm(a);
        if (off > 1e-12 * scale)
            throw NoConvergence("sym_eig: Jacobi sweep budget exhausted", off);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index l, Eigen::Index r) { return a(l, l) < a(r, r); });

    SymEig out{Vector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

double psd_margin(const SymMatrix& m) {
    if (m.size() == 0) return std::numeric_limits<double>::infinity();
    if (m.size() == 1) return m(0, 0);
    return sym_eig(m).values(0);
}

std::pair<double, Vector> min_eigenpair(const SymMatrix& m) {
    if (m.size() == 1) return {m(0, 0), Vector::Ones(1)};
    SymEig e = sym_eig(m);
    return {e.values(0), e.vectors.col(0)};
}

Matrix null_space_basis(const Matrix& e, double tol_rank) {
    const Eigen::Index q = e.cols();
    if (e.rows() == 0 || max_abs(e) == 0.0) return Matrix::Identity(q, q);

    Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > tol_rank * smax) ++rank;
    return svd.matrixV().rightCols(q - rank);
}

double min_gamma(const SymMatrix& mi, const SymMatrix& mj, double tol_ker) {
    if (mi.size() != mj.size()) throw DimensionMismatch("min_gamma: size mismatch");
    const SymEig ej = sym_eig(mj);
    const Eigen::Index n = mj.size();
    const double top = std::max(ej.values(n - 1), 0.0);
    const double thr = tol_ker * top;

    std::vector<Eigen::Index> range, kernel;
    for (Eigen::Index k = 0; k < n; ++k) (ej.values(k) > thr ? range : kernel).push_back(k);

    const double mi_scale = std::max(mi.matrix().norm(), 1e-300);
    if (!kernel.empty()) {
        Matrix kbasis(n, static_cast<Eigen::Index>(kernel.size()));
        for (std::size_t c = 0; c < kernel.size(); ++c)
            kbasis.col(static_cast<Eigen::Index>(c)) = ej.vectors.col(kernel[c]);
        const double residual = (mi.matrix() * kbasis).norm();
        if (residual > tol_ker * mi_scale && residual > 1e-14) {
            throw KernelMismatch("min_gamma: ker(Mj) is not contained in ker(Mi) (residual " +
                                 std::to_string(residual) + ")");
        }
    }
    if (range.empty()) return 0.0;

    const auto r = static_cast<Eigen::Index>(range.size());
    Matrix u(n, r);
    Vector d(r);
    for (Eigen::Index c = 0; c < r; ++c) {
        u.col(c) = ej.vectors.col(range[static_cast<std::size_t>(c)]);
        d(c) = ej.values(range[static_cast<std::size_t>(c)]);
    }
    const Matrix mi_r = u.transpose() * mi.matrix() * u;
    // Congruence by R^{-1/2}; diagonal entries divide directly.
    Matrix scaled(r, r);
    for (Eigen::Index a = 0; a < r; ++a)
        for (Eigen::Index b = 0; b < r; ++b)
            scaled(a, b) = a == b ? mi_r(a, a) / d(a) : mi_r(a, b) / std::sqrt(d(a) * d(b));
    return sym_eig(SymMatrix::trusted(scaled)).values(r - 1);
}

}  // namespace hyperswitch
