#include "constraints.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "hyperswitch/errors.hpp"

namespace hyperswitch::detail {

namespace {

using AffineFn = std::function<Matrix(const Vector&)>;

// Extracts constant and per-variable coefficients of an affine matrix function
// of the variables listed in `vars` (global indices).
LmiBlock affine_block(std::string label, const std::vector<int>& vars, const AffineFn& f) {
    const auto k = static_cast<Eigen::Index>(vars.size());
    const Matrix c = f(Vector::Zero(k));
    LmiBlock b{std::move(label), c, {}};
    for (Eigen::Index j = 0; j < k; ++j) {
        Vector e = Vector::Zero(k);
        e(j) = 1.0;
        Matrix a = f(e) - c;
        if (a.size() > 0 && a.cwiseAbs().maxCoeff() > 0.0) b.coeffs.emplace_back(vars[static_cast<std::size_t>(j)], std::move(a));
    }
    return b;
}

std::vector<int> mode_vars(int n, int mode) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[static_cast<std::size_t>(k)] = mode * n + k;
    return v;
}

std::vector<int> pair_vars(int n, int a, int b) {
    std::vector<int> v = mode_vars(n, a);
    const std::vector<int> w = mode_vars(n, b);
    v.insert(v.end(), w.begin(), w.end());
    return v;
}

// Appends the upper-triangular entries of an affine matrix function of two
// modes' weights as rows of E.
void append_equalities(Matrix& e, int num_vars, const std::vector<int>& vars, const AffineFn& f) {
    const auto k = static_cast<Eigen::Index>(vars.size());
    const Matrix c = f(Vector::Zero(k));
    const Eigen::Index dim = c.rows();
    std::vector<Matrix> coeff;
    for (Eigen::Index j = 0; j < k; ++j) {
        Vector u = Vector::Zero(k);
        u(j) = 1.0;
        coeff.push_back(f(u) - c);
    }
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index s = r; s < dim; ++s) {
            Vector row = Vector::Zero(num_vars);
            for (Eigen::Index j = 0; j < k; ++j) row(vars[static_cast<std::size_t>(j)]) = coeff[static_cast<std::size_t>(j)](r, s);
            if (row.cwiseAbs().maxCoeff() == 0.0) continue;
            e.conservativeResize(e.rows() + 1, num_vars);
            e.row(e.rows() - 1) = row.transpose();
        }
    }
}

Matrix row_space_basis(const Matrix& rows) {
    const Eigen::Index r = rows.rows();
    const Eigen::Index n = rows.cols();
    Eigen::HouseholderQR<Matrix> qr(rows.transpose());
    return qr.householderQ() * Matrix::Identity(n, r);
}

enum class Interior { Weighted, Unweighted, MuZero, Diagonal, OneSigned };
enum class Boundary { Bordered, Compact, OneSigned };

Interior interior_kind(Variant v) {
    switch (v) {
        case Variant::CommonSignFree: return Interior::Unweighted;
        case Variant::MuZero: return Interior::MuZero;
        case Variant::DiagonalSource: return Interior::Diagonal;
        case Variant::OneSigned: return Interior::OneSigned;
        default: return Interior::Weighted;
    }
}

Boundary boundary_kind(Variant v) {
    switch (v) {
        case Variant::CommonSignFree: return Boundary::Compact;
        case Variant::OneSigned: return Boundary::OneSigned;
        default: return Boundary::Bordered;
    }
}

std::vector<LmiBlock> mode_blocks(const Mode& mode, Variant variant, int index, double mu, double nu,
                                  const XCheck& x_check, int offset) {
    const int n = mode.n();
    std::vector<int> vars(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) vars[static_cast<std::size_t>(k)] = offset + k;
    const std::string tag = "mode " + std::to_string(index) + " ";
    const Matrix lp = mode.lambda_abs().asDiagonal();
    const Matrix& f = mode.F();
    const Matrix id = Matrix::Identity(n, n);
    std::vector<LmiBlock> out;

    switch (interior_kind(variant)) {
        case Interior::Weighted: {
            if (interior_x_independent(mode, mu) || x_check.kind == XCheck::Kind::Grid) {
                const int pts = interior_x_independent(mode, mu) ? 1 : x_check.n_x;
                for (int i = 0; i < pts; ++i) {
                    const double x = pts == 1 ? 0.0 : static_cast<double>(i) / (pts - 1);
                    out.push_back(affine_block(tag + "interior x=" + std::to_string(x), vars, [&](const Vector& q) {
                        return interior_lmi_slack(mode, mu, nu, q, x).matrix();
                    }));
                }
            } else {
                const int cells = x_check.n_x - 1;
                const int m = mode.m();
                for (int i = 0; i < cells; ++i) {
                    const double x0 = static_cast<double>(i) / cells;
                    const double x1 = static_cast<double>(i + 1) / cells;
                    out.push_back(affine_block(tag + "interior cell [" + std::to_string(x0) + "," + std::to_string(x1) + "]",
                                               vars, [&](const Vector& q) {
                                                   return interior_interval_slack(mode, mu, nu, q.head(m).asDiagonal(),
                                                                                  q.tail(n - m).asDiagonal(), x0, x1)
                                                       .matrix();
                                               }));
                }
            }
            break;
        }
        case Interior::Unweighted:
            out.push_back(affine_block(tag + "interior", vars, [&](const Vector& q) {
                const Matrix qq = q.asDiagonal();
                return Matrix(-f.transpose() * qq - qq * f - 2.0 * nu * qq);
            }));
            break;
        case Interior::MuZero:
            out.push_back(affine_block(tag + "interior", vars, [&](const Vector& q) {
                const Matrix qq = q.asDiagonal();
                return Matrix(-f.transpose() * qq - qq * f - 2.0 * nu * id);
            }));
            break;
        case Interior::Diagonal: {
            const Vector d = mu * mode.lambda_abs() - f.diagonal() - nu * Vector::Ones(n);
            out.push_back(affine_block(tag + "interior", vars, [&](const Vector&) { return Matrix(d.asDiagonal()); }));
            break;
        }
        case Interior::OneSigned:
            out.push_back(affine_block(tag + "interior", vars, [&](const Vector& q) {
                const Matrix qq = q.asDiagonal();
                return Matrix(2.0 * mu * qq * lp - f.transpose() * qq - qq * f - 2.0 * nu * id);
            }));
            break;
    }

    switch (boundary_kind(variant)) {
        case Boundary::Bordered:
            out.push_back(affine_block(tag + "boundary", vars, [&](const Vector& q) {
                return boundary_lmi_slack(mode, mu, q).matrix();
            }));
            break;
        case Boundary::Compact:
            out.push_back(affine_block(tag + "boundary", vars, [&](const Vector& q) {
                return compact_boundary_slack(mode, 0.0, q).matrix();
            }));
            break;
        case Boundary::OneSigned:
            out.push_back(affine_block(tag + "boundary", vars, [&](const Vector& q) {
                const Matrix ql = Matrix(q.asDiagonal()) * lp;
                return Matrix(std::exp(-2.0 * mu) * ql - mode.G().transpose() * ql * mode.G());
            }));
            break;
    }
    return out;
}

bool uses_sign_split_coupling(Variant v) {
    return v == Variant::CommonSignFixed || v == Variant::DwellSignFixed || v == Variant::MuZero ||
           v == Variant::DiagonalSource || v == Variant::OneSigned;
}

}  // namespace

Matrix weight_minus(const Mode& mode, const Vector& q) {
    const Matrix s = mode.S_minus();
    return s.transpose() * q.head(mode.m()).asDiagonal() * s;
}

Matrix weight_plus(const Mode& mode, const Vector& q) {
    const Matrix s = mode.S_plus();
    return s.transpose() * q.tail(mode.n() - mode.m()).asDiagonal() * s;
}

Matrix weight_full(const Mode& mode, const Vector& q) {
    return mode.S().transpose() * q.asDiagonal() * mode.S();
}

void require_variant_structure(const SwitchedSystem& sys, Variant variant) {
    switch (variant) {
        case Variant::UnswitchedProp21:
            if (sys.size() != 1) throw VariantPreconditionViolated("UnswitchedProp21 needs exactly one mode");
            break;
        case Variant::CommonSignFixed:
        case Variant::DwellSignFixed:
        case Variant::MuZero:
            if (!sys.common_sign_structure())
                throw VariantPreconditionViolated(to_string(variant) + " needs equal m_i in every mode");
            break;
        case Variant::DiagonalSource:
            if (!sys.common_sign_structure())
                throw VariantPreconditionViolated("DiagonalSource needs equal m_i in every mode");
            for (const Mode& m : sys.modes())
                if (!m.has_diagonal_source())
                    throw VariantPreconditionViolated("DiagonalSource needs diagonal F_i in every mode");
            break;
        case Variant::OneSigned:
            if (!sys.all_one_signed())
                throw VariantPreconditionViolated("OneSigned needs all m_i = 0 or all m_i = n");
            break;
        case Variant::CommonSignFree:
        case Variant::DwellSignFree:
            break;
    }
    if (variant == Variant::DwellSignFixed) {
        // A finite gamma needs ker(S_i^+) = ker(S_j^+) and the same for S^-.
        const int n = sys.n();
        for (int i = 0; i < sys.size(); ++i) {
            for (int j = 0; j < sys.size(); ++j) {
                if (i == j) continue;
                const Vector ones = Vector::Ones(n);
                min_gamma(SymMatrix::trusted(weight_plus(sys.mode(i), ones)),
                          SymMatrix::trusted(weight_plus(sys.mode(j), ones)));
                min_gamma(SymMatrix::trusted(weight_minus(sys.mode(i), ones)),
                          SymMatrix::trusted(weight_minus(sys.mode(j), ones)));
            }
        }
    }
}

std::vector<double> expand_mu(const SwitchedSystem& sys, const std::vector<double>& mu) {
    if (mu.size() == 1) return std::vector<double>(static_cast<std::size_t>(sys.size()), mu.front());
    if (static_cast<int>(mu.size()) != sys.size()) throw DimensionMismatch("mu needs one entry per mode");
    return mu;
}

LmiProblem build_single_mode_problem(const SwitchedSystem& sys, Variant variant, int mode, double mu, double nu,
                                     const XCheck& x_check) {
    LmiProblem p;
    p.num_vars = sys.n();
    p.lower = kQFloor;
    p.blocks = mode_blocks(sys.mode(mode), variant, mode, mu, nu, x_check, 0);
    return p;
}

LmiProblem build_problem(const SwitchedSystem& sys, Variant variant, const std::vector<double>& mu_in, double nu,
                         double gamma, const XCheck& x_check) {
    const std::vector<double> mu = expand_mu(sys, mu_in);
    const int n = sys.n();
    const int modes = sys.size();
    LmiProblem p;
    p.num_vars = n * modes;
    p.lower = kQFloor;
    p.equalities = Matrix(0, p.num_vars);
    for (int i = 0; i < modes; ++i) {
        auto blocks = mode_blocks(sys.mode(i), variant, i, mu[static_cast<std::size_t>(i)], nu, x_check, i * n);
        for (auto& b : blocks) p.blocks.push_back(std::move(b));
    }
    if (modes == 1) return p;

    const bool dwell = is_dwell_variant(variant);
    const bool as_equalities = !dwell || gamma == 1.0;
    const bool split = uses_sign_split_coupling(variant);

    using WeightFn = Matrix (*)(const Mode&, const Vector&);
    std::vector<WeightFn> parts;
    if (split) {
        parts = {&weight_minus, &weight_plus};
    } else {
        parts = {&weight_full};
    }

    if (as_equalities) {
        for (int i = 0; i + 1 < modes; ++i) {
            const Mode& a = sys.mode(i);
            const Mode& b = sys.mode(i + 1);
            for (WeightFn w : parts) {
                append_equalities(p.equalities, p.num_vars, pair_vars(n, i, i + 1), [&](const Vector& q) {
                    return Matrix(w(a, q.head(n)) - w(b, q.tail(n)));
                });
            }
        }
        return p;
    }

    for (int i = 0; i < modes; ++i) {
        for (int j = 0; j < modes; ++j) {
            if (i == j) continue;
            const Mode& mi = sys.mode(i);
            const Mode& mj = sys.mode(j);
            for (std::size_t part = 0; part < parts.size(); ++part) {
                Matrix u;
                if (split) {
                    const Matrix rows = part == 0 ? mj.S_minus() : mj.S_plus();
                    if (rows.rows() == 0) continue;
                    u = row_space_basis(rows);
                } else {
                    u = Matrix::Identity(n, n);
                }
                const WeightFn w = parts[part];
                const std::string label = "pair " + std::to_string(i) + "<=" + std::to_string(j) +
                                          (split ? (part == 0 ? " minus" : " plus") : "");
                p.blocks.push_back(affine_block(label, pair_vars(n, i, j), [&](const Vector& q) {
                    return Matrix(u.transpose() * (w(mj, q.tail(n)) - w(mi, q.head(n)) / gamma) * u);
                }));
            }
        }
    }
    return p;
}

std::vector<Vector> split_weights(const SwitchedSystem& sys, const Vector& q) {
    std::vector<Vector> out;
    for (int i = 0; i < sys.size(); ++i) out.push_back(q.segment(i * sys.n(), sys.n()));
    return out;
}

Vector stack_weights(const std::vector<Vector>& q) {
    Eigen::Index total = 0;
    for (const Vector& v : q) total += v.size();
    Vector out(total);
    Eigen::Index at = 0;
    for (const Vector& v : q) {
        out.segment(at, v.size()) = v;
        at += v.size();
    }
    return out;
}

}  // namespace hyperswitch::detail
