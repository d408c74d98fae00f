#include "posctl/drugdesign.hpp"

#include "posctl/error.hpp"
#include "posctl/metrics.hpp"
#include "posctl/numerics.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <map>

namespace posctl {

namespace {

PositiveSystem restrict_controls(const PositiveSystem& sys, const std::vector<int>& support) {
    PositiveSystem out{sys.A, sys.B, sys.C, Matrix(sys.states(), static_cast<Eigen::Index>(support.size()))};
    for (std::size_t k = 0; k < support.size(); ++k) out.D.col(static_cast<Eigen::Index>(k)) = sys.D.col(support[k]);
    return out;
}

Matrix restrict_square(const Matrix& R, const std::vector<int>& support) {
    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix out(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < k; ++j) out(i, j) = R(support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]);
    }
    return out;
}

// c * 1 with c = 1, 2, 4, ... until the closed loop is Hurwitz.
bool stabilizing_start(const PositiveSystem& sys, Vector& u) {
    for (double c = 1.0; c <= 1e6; c *= 2.0) {
        u = Vector::Constant(sys.controls(), c);
        if (is_hurwitz(closed_loop(sys, u))) return true;
    }
    return false;
}

SolveReport run(const Problem& prob, const Vector& u0, const SolverOptions& opts) {
    if (prob.objective->smooth()) return proximal_gradient(prob, u0, opts);
    return mm_solver(prob, u0, Vector(), opts);
}

SmoothTerm penalty(const TherapyProblem& p, const Matrix& R) {
    return p.R.size() == 0 ? SmoothTerm{} : quadratic_term(R);
}

}  // namespace

void TherapyProblem::check() const {
    const auto violations = validate(sys);
    if (!violations.empty()) {
        throw Error(ErrorCode::AssumptionViolation, "system fails validation: " + violations.front().matrix + " " +
                                                        violations.front().message);
    }
    if (R.size() != 0) {
        if (R.rows() != sys.controls() || R.cols() != sys.controls()) {
            throw Error(ErrorCode::DimensionMismatch, "R must be m x m");
        }
        if (!R.isApprox(R.transpose(), 1e-12) || Eigen::LLT<Matrix>(R).info() != Eigen::Success) {
            throw Error(ErrorCode::InvalidArgument, "R must be symmetric positive definite");
        }
    }
}

int cardinality(const Vector& u) {
    return static_cast<int>((u.array().abs() > kCardinalityThreshold).count());
}

std::vector<int> support_of(const Vector& u) {
    std::vector<int> s;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (std::fabs(u(i)) > kCardinalityThreshold) s.push_back(static_cast<int>(i));
    }
    return s;
}

std::vector<double> default_gamma_grid() {
    std::vector<double> g(50);
    for (int k = 0; k < 50; ++k) g[static_cast<std::size_t>(k)] = std::pow(10.0, -2.0 + 3.0 * k / 49.0);
    return g;
}

SolveReport budget_design(const TherapyProblem& p, double budget, const SolverOptions& opts) {
    p.check();
    if (!(budget > 0.0)) throw Error(ErrorCode::InvalidArgument, "budget must be positive");
    const Eigen::Index m = p.sys.controls();
    Problem prob{make_objective(p.sys, p.metric), penalty(p, p.R), Regularizer::constraint(ConstraintSet::simplex(budget))};

    Vector u0 = Vector::Constant(m, budget / static_cast<double>(m));
    if (!std::isfinite(prob.smooth_value(u0))) {
        bool found = false;
        for (Eigen::Index k = 0; k < m && !found; ++k) {
            u0 = Vector::Zero(m);
            u0(k) = budget;
            found = std::isfinite(prob.smooth_value(u0));
        }
        if (!found) throw Error(ErrorCode::Infeasible, "no stabilizing dose on the budget simplex was found");
    }
    if (m == 1) {
        SolveReport rep;
        rep.u = u0;
        rep.trace = {prob.value(u0)};
        rep.stationarity = 0.0;
        rep.termination = Termination::Stationary;
        return rep;
    }
    return run(prob, u0, opts);
}

PolishResult polish(const TherapyProblem& p, const std::vector<int>& support, const SolverOptions& opts) {
    p.check();
    std::vector<int> S = support;
    std::sort(S.begin(), S.end());
    S.erase(std::unique(S.begin(), S.end()), S.end());
    for (int i : S) {
        if (i < 0 || i >= p.sys.controls()) throw Error(ErrorCode::InvalidArgument, "support index out of range");
    }

    PolishResult out;
    out.support = S;
    out.u = Vector::Zero(p.sys.controls());
    if (S.empty()) {
        if (!is_hurwitz(p.sys.A)) throw Error(ErrorCode::Infeasible, "A is not Hurwitz and the support is empty");
        out.J = p.metric == Metric::H2 ? j2(p.sys, out.u) : jinf(p.sys, out.u);
        out.objective = out.J;
        return out;
    }

    const PositiveSystem reduced = restrict_controls(p.sys, S);
    const Matrix R_S = p.R.size() == 0 ? Matrix() : restrict_square(p.R, S);
    Problem prob{make_objective(reduced, p.metric), penalty(p, R_S), Regularizer::constraint(ConstraintSet::nonneg())};
    Vector v0;
    if (!stabilizing_start(reduced, v0)) {
        throw Error(ErrorCode::Infeasible, "no dose supported on the given drugs stabilizes the system");
    }
    const SolveReport rep = run(prob, v0, opts);
    const Vector v = rep.u.cwiseMax(0.0);
    for (std::size_t k = 0; k < S.size(); ++k) out.u(S[k]) = v(static_cast<Eigen::Index>(k));
    out.J = prob.objective->value(v);
    out.objective = prob.smooth_value(v);
    return out;
}

HomotopyPath sparsity_homotopy(const TherapyProblem& p, int target, std::vector<double> gammas, double eps,
                               const SolverOptions& opts) {
    p.check();
    if (p.R.size() == 0) throw Error(ErrorCode::InvalidArgument, "the sparsity homotopy needs a quadratic penalty R");
    const int m = static_cast<int>(p.sys.controls());
    if (target < 0 || target > m) throw Error(ErrorCode::InvalidArgument, "target drug count out of range");
    if (gammas.empty()) gammas = default_gamma_grid();
    for (std::size_t k = 1; k < gammas.size(); ++k) {
        if (!(gammas[k] > gammas[k - 1])) throw Error(ErrorCode::InvalidArgument, "gamma grid must increase strictly");
    }

    HomotopyPath path;
    std::vector<int> all(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = i;
    PolishResult dense = polish(p, all, opts);
    path.epsilon = eps > 0.0 ? eps : 1e-4 * dense.u.lpNorm<1>();
    if (!(path.epsilon > 0.0)) path.epsilon = 1e-4;
    path.polished.push_back(dense);

    const auto objective = make_objective(p.sys, p.metric);
    const SmoothTerm quad = quadratic_term(p.R);
    std::map<int, bool> polished_card{{cardinality(dense.u), true}};
    Vector u = dense.u;
    Vector w = Vector::Ones(m);

    for (double gamma : gammas) {
        HomotopyPoint pt;
        pt.gamma = gamma;
        std::vector<int> prev_support = support_of(u);
        for (int r = 0; r < 5; ++r) {
            Problem prob{objective, quad, Regularizer::weighted_l1(gamma, w, true)};
            Vector next = run(prob, u, opts).u.cwiseMax(0.0);
            if (std::isfinite(prob.value(next))) u = next;
            w = (u.array() + path.epsilon).inverse().matrix();
            pt.reweights = r + 1;
            const std::vector<int> s = support_of(u);
            if (s == prev_support && r > 0) break;
            prev_support = s;
        }
        pt.u = u;
        pt.cardinality = cardinality(u);
        pt.J = objective->value(u);
        path.points.push_back(pt);

        if (!polished_card.count(pt.cardinality)) {
            polished_card[pt.cardinality] = true;
            path.polished.push_back(polish(p, support_of(u), opts));
        }
        if (pt.cardinality <= target) {
            path.reached = true;
            return path;
        }
    }
    const std::string msg = "largest gamma still leaves " + std::to_string(path.points.back().cardinality) +
                            " drugs active, target " + std::to_string(target);
    throw HomotopyError(msg, std::move(path));
}

std::vector<DegradationRow> degradation_report(const HomotopyPath& path) {
    if (path.polished.empty()) return {};
    const double base = path.polished.front().objective;
    std::vector<DegradationRow> rows;
    for (const auto& pr : path.polished) {
        rows.push_back({static_cast<int>(pr.support.size()), 100.0 * (pr.objective / base - 1.0)});
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.N < b.N; });
    return rows;
}

}  // namespace posctl
