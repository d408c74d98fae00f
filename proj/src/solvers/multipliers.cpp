#include "posctl/error.hpp"
#include "posctl/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace posctl {

SolveReport mm_solver(const Problem& problem, const Vector& u0, const Vector& lambda0,
                      const SolverOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    if (problem.reg.kind() == Regularizer::Kind::None) return optimal_subgradient_descent(problem, u0, opts);
    if (u0.size() != problem.dim()) throw Error(ErrorCode::DimensionMismatch, "u0 length");
    if (lambda0.size() != 0 && lambda0.size() != problem.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "lambda0 length");
    }
    if (problem.reg.kind() == Regularizer::Kind::Constraint) problem.reg.set().check(problem.dim());

    SolveReport rep;
    rep.termination = Termination::MaxIter;
    Vector u = u0;
    Vector lambda = lambda0.size() == 0 ? Vector::Zero(u0.size()) : lambda0;
    double mu = opts.mu0;
    double r_prev = kInf;
    Vector v = problem.reg.prox(u + mu * lambda, mu);
    rep.trace.push_back(problem.value(v));

    for (int k = 0; k < opts.max_outer; ++k) {
        // Inner problem: J + s + M_{mu g}(u + mu lambda), differentiable
        // apart from J.
        const Vector lam = lambda;
        const double m = mu;
        const Regularizer& g = problem.reg;
        const SmoothTerm outer_s = problem.smooth;
        Problem inner{problem.objective,
                      SmoothTerm{[&g, lam, m, outer_s](const Vector& x) {
                                     const double s = outer_s.empty() ? 0.0 : outer_s.value(x);
                                     return s + g.envelope(x + m * lam, m);
                                 },
                                 [&g, lam, m, outer_s](const Vector& x) -> Vector {
                                     Vector d = g.envelope_gradient(x + m * lam, m);
                                     if (!outer_s.empty()) d += outer_s.gradient(x);
                                     return d;
                                 }},
                      Regularizer::none()};
        SolverOptions inner_opts = opts;
        inner_opts.max_iter = opts.max_inner;
        inner_opts.tol = std::clamp(0.1 * r_prev, 1e-9, 1e-4);
        inner_opts.throw_on_stall = false;
        inner_opts.on_iteration = nullptr;
        u = optimal_subgradient_descent(inner, u, inner_opts).u;

        v = problem.reg.prox(u + mu * lambda, mu);
        const double r = (u - v).norm();
        lambda += (u - v) / mu;
        rep.trace.push_back(problem.value(v));
        rep.iterations = k + 1;
        rep.stationarity = r;
        if (opts.on_iteration) opts.on_iteration(k + 1, rep.trace.back());
        if (lambda.norm() > 1e8) throw Error(ErrorCode::Diverged, "multiplier norm exceeded 1e8");
        if (r <= opts.tol) {
            rep.termination = Termination::Stationary;
            break;
        }
        if (r > 0.25 * r_prev) mu *= 0.5;
        r_prev = r;
    }

    rep.u = v;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace posctl
