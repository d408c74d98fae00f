#include "posctl/error.hpp"
#include "posctl/numerics.hpp"

#include <Eigen/LU>

#include <cmath>
#include <vector>

namespace posctl {

std::string_view to_string(LpStatus status) {
    switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    }
    return "Unknown";
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr int kMaxPivots = 100000;

// Dense tableau over the standard form  A z = b, z >= 0, b >= 0.
class Tableau {
public:
    Tableau(Matrix A, Vector b, std::vector<int> basis)
        : tab_(std::move(A)), rhs_(std::move(b)), basis_(std::move(basis)) {}

    Eigen::Index rows() const { return tab_.rows(); }
    Eigen::Index cols() const { return tab_.cols(); }
    const std::vector<int>& basis() const { return basis_; }
    const Vector& rhs() const { return rhs_; }
    double at(Eigen::Index i, Eigen::Index j) const { return tab_(i, j); }

    void pivot(Eigen::Index r, Eigen::Index c) {
        const double p = tab_(r, c);
        tab_.row(r) /= p;
        rhs_(r) /= p;
        for (Eigen::Index i = 0; i < rows(); ++i) {
            if (i == r) continue;
            const double f = tab_(i, c);
            if (f == 0.0) continue;
            tab_.row(i) -= f * tab_.row(r);
            rhs_(i) -= f * rhs_(r);
            if (std::fabs(rhs_(i)) < 1e-14) rhs_(i) = 0.0;
        }
        basis_[static_cast<std::size_t>(r)] = static_cast<int>(c);
    }

    // Minimizes cost^T z over columns [0, allowed); Bland's rule throughout.
    // Returns false if unbounded.
    bool optimize(const Vector& cost, Eigen::Index allowed, int& pivots) {
        for (;;) {
            Vector reduced = cost.head(allowed);
            for (Eigen::Index i = 0; i < rows(); ++i) {
                const double cb = cost(basis_[static_cast<std::size_t>(i)]);
                if (cb != 0.0) reduced -= cb * tab_.row(i).head(allowed).transpose();
            }
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j) {
                if (reduced(j) < -kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;

            double best = kInf;
            for (Eigen::Index i = 0; i < rows(); ++i) {
                const double a = tab_(i, enter);
                if (a > kPivotTol) best = std::min(best, rhs_(i) / a);
            }
            if (!std::isfinite(best)) return false;
            // ties go to the smallest basic index (Bland)
            const double slack = 1e-12 * (1.0 + std::fabs(best));
            Eigen::Index leave = -1;
            for (Eigen::Index i = 0; i < rows(); ++i) {
                const double a = tab_(i, enter);
                if (a <= kPivotTol || rhs_(i) / a > best + slack) continue;
                if (leave < 0 || basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]) {
                    leave = i;
                }
            }
            pivot(leave, enter);
            if (++pivots > kMaxPivots) {
                throw Error(ErrorCode::NumericalBreakdown, "simplex pivot budget exhausted");
            }
        }
    }

private:
    Matrix tab_;
    Vector rhs_;
    std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const LpProblem& p) {
    const Eigen::Index n = p.c.size();
    const Eigen::Index m_ub = p.A_ub.rows();
    const Eigen::Index m_eq = p.A_eq.rows();
    const Vector lower = p.lower.size() == 0 ? Vector::Zero(n) : p.lower;
    if (lower.size() != n || (m_ub > 0 && p.A_ub.cols() != n) || (m_eq > 0 && p.A_eq.cols() != n) ||
        p.b_ub.size() != m_ub || p.b_eq.size() != m_eq) {
        throw Error(ErrorCode::DimensionMismatch, "inconsistent LP dimensions");
    }
    if (!p.b_ub.allFinite() || !p.b_eq.allFinite() || !p.c.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "LP data must be finite");
    }

    // x = shift + T z with z >= 0; free variables are split into two columns.
    Vector shift = Vector::Zero(n);
    std::vector<std::pair<Eigen::Index, double>> zmap;  // (original index, sign)
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::isfinite(lower(i))) {
            shift(i) = lower(i);
            zmap.emplace_back(i, 1.0);
        } else {
            zmap.emplace_back(i, 1.0);
            zmap.emplace_back(i, -1.0);
        }
    }
    const auto nz = static_cast<Eigen::Index>(zmap.size());
    const Eigen::Index m = m_ub + m_eq;

    Matrix T = Matrix::Zero(n, nz);
    for (Eigen::Index k = 0; k < nz; ++k) T(zmap[static_cast<std::size_t>(k)].first, k) = zmap[static_cast<std::size_t>(k)].second;

    // Row signs make every right-hand side nonnegative.
    Matrix Astd = Matrix::Zero(m, nz + m_ub);
    Vector bstd(m);
    Vector sign = Vector::Ones(m);
    if (m_ub > 0) {
        Astd.topLeftCorner(m_ub, nz) = p.A_ub * T;
        Astd.block(0, nz, m_ub, m_ub).setIdentity();
        bstd.head(m_ub) = p.b_ub - p.A_ub * shift;
    }
    if (m_eq > 0) {
        Astd.bottomLeftCorner(m_eq, nz) = p.A_eq * T;
        bstd.tail(m_eq) = p.b_eq - p.A_eq * shift;
    }
    for (Eigen::Index i = 0; i < m; ++i) {
        if (bstd(i) < 0.0) {
            sign(i) = -1.0;
            Astd.row(i) *= -1.0;
            bstd(i) = -bstd(i);
        }
    }

    // Artificial columns for rows that lack a ready unit slack.
    const Eigen::Index nstd = nz + m_ub;
    std::vector<int> basis(static_cast<std::size_t>(m), -1);
    std::vector<Eigen::Index> art_rows;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (i < m_ub && sign(i) > 0.0) {
            basis[static_cast<std::size_t>(i)] = static_cast<int>(nz + i);
        } else {
            art_rows.push_back(i);
        }
    }
    const auto n_art = static_cast<Eigen::Index>(art_rows.size());
    Matrix full = Matrix::Zero(m, nstd + n_art);
    full.leftCols(nstd) = Astd;
    for (Eigen::Index k = 0; k < n_art; ++k) {
        full(art_rows[static_cast<std::size_t>(k)], nstd + k) = 1.0;
        basis[static_cast<std::size_t>(art_rows[static_cast<std::size_t>(k)])] = static_cast<int>(nstd + k);
    }

    Tableau tab(full, bstd, basis);
    LpResult result;
    int pivots = 0;

    if (n_art > 0) {
        Vector phase1 = Vector::Zero(nstd + n_art);
        phase1.tail(n_art).setOnes();
        tab.optimize(phase1, nstd + n_art, pivots);
        double infeas = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (tab.basis()[static_cast<std::size_t>(i)] >= nstd) infeas += tab.rhs()(i);
        }
        const double scale = 1.0 + (bstd.size() ? bstd.cwiseAbs().maxCoeff() : 0.0);
        if (infeas > 1e-9 * scale) {
            result.status = LpStatus::Infeasible;
            result.iterations = pivots;
            return result;
        }
        // Drive remaining artificials out of the basis where possible; rows
        // where that fails are redundant and keep a zero-valued artificial.
        for (Eigen::Index i = 0; i < m; ++i) {
            if (tab.basis()[static_cast<std::size_t>(i)] < nstd) continue;
            Eigen::Index best = -1;
            double best_mag = kPivotTol;
            for (Eigen::Index j = 0; j < nstd; ++j) {
                if (std::fabs(tab.at(i, j)) > best_mag) {
                    best_mag = std::fabs(tab.at(i, j));
                    best = j;
                }
            }
            if (best >= 0) tab.pivot(i, best);
        }
    }

    Vector cost = Vector::Zero(nstd + n_art);
    cost.head(nz) = T.transpose() * p.c;
    if (!tab.optimize(cost, nstd, pivots)) {
        result.status = LpStatus::Unbounded;
        result.iterations = pivots;
        return result;
    }

    Vector z = Vector::Zero(nstd + n_art);
    for (Eigen::Index i = 0; i < m; ++i) z(tab.basis()[static_cast<std::size_t>(i)]) = tab.rhs()(i);
    result.status = LpStatus::Optimal;
    result.x = shift + T * z.head(nz);
    result.objective = p.c.dot(result.x);
    result.iterations = pivots;

    // Duals from B^T y = c_B on the standard-form matrix.
    result.dual_ub = Vector::Zero(m_ub);
    result.dual_eq = Vector::Zero(m_eq);
    if (m > 0) {
        Matrix B(m, m);
        Vector cb(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const int col = tab.basis()[static_cast<std::size_t>(i)];
            B.col(i) = full.col(col);
            cb(i) = cost(col);
        }
        Eigen::FullPivLU<Matrix> lu(B.transpose());
        const Vector y = lu.solve(cb);
        for (Eigen::Index i = 0; i < m_ub; ++i) result.dual_ub(i) = -sign(i) * y(i);
        for (Eigen::Index i = 0; i < m_eq; ++i) result.dual_eq(i) = -sign(m_ub + i) * y(m_ub + i);
    }
    return result;
}

}  // namespace posctl
