#include "posctl/error.hpp"
#include "posctl/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace posctl {

namespace {

Vector smooth_part_gradient(const Problem& problem, const Vector& u) {
    const auto blocks = problem.objective->blocks(u);
    return blocks.front().gradient + problem.smooth_gradient(u);
}

}  // namespace

SolveReport proximal_gradient(const Problem& problem, const Vector& u0, const SolverOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    if (!problem.objective->smooth()) {
        throw Error(ErrorCode::InvalidArgument, "proximal gradient needs a differentiable objective");
    }
    if (u0.size() != problem.dim()) throw Error(ErrorCode::DimensionMismatch, "u0 length");
    if (problem.reg.kind() == Regularizer::Kind::Constraint) problem.reg.set().check(problem.dim());

    SolveReport rep;
    Vector u = u0;
    double f = problem.smooth_value(u);
    double F = f + problem.reg.value(u);
    if (!std::isfinite(f)) throw Error(ErrorCode::NonHurwitz, "start point is not stabilizing");
    if (!std::isfinite(F)) throw Error(ErrorCode::Infeasible, "start point is outside the domain of g");
    rep.trace.push_back(F);

    Vector grad = smooth_part_gradient(problem, u);
    double t = opts.initial_step;
    rep.termination = Termination::MaxIter;

    for (int k = 0; k < opts.max_iter; ++k) {
        Vector u_next;
        double F_next = kInf;
        double residual = kInf;
        bool accepted = false;
        bool any_finite = false;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            u_next = problem.reg.prox(u - t * grad, t);
            residual = (u - u_next).norm() / t;
            if (residual <= opts.tol) break;
            F_next = problem.value(u_next);
            if (std::isfinite(F_next)) {
                any_finite = true;
                if (F_next <= F - (opts.armijo / t) * (u_next - u).squaredNorm()) {
                    accepted = true;
                    break;
                }
            }
            t *= opts.backtrack;
        }
        rep.stationarity = residual;
        if (residual <= opts.tol) {
            rep.termination = Termination::Stationary;
            break;
        }
        if (!accepted) {
            if (!any_finite) {
                throw Error(ErrorCode::Diverged, "objective stayed infinite through the backtracking budget");
            }
            rep.termination = Termination::NoProgress;
            break;
        }

        const Vector grad_next = smooth_part_gradient(problem, u_next);
        if (opts.barzilai_borwein) {
            const Vector s = u_next - u;
            const Vector y = grad_next - grad;
            const double sy = s.dot(y);
            t = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-10, 1e10) : std::min(2.0 * t, 1e10);
        }
        u = u_next;
        F = F_next;
        grad = grad_next;
        rep.trace.push_back(F);
        rep.iterations = k + 1;
        if (opts.on_iteration) opts.on_iteration(k + 1, F);
    }

    rep.u = u;
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

}  // namespace posctl
