#include "posctl/error.hpp"
#include "posctl/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace posctl {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::size_t top_block(const std::vector<BlockGradient>& blocks) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < blocks.size(); ++j) {
        if (blocks[j].value > blocks[best].value) best = j;
    }
    return best;
}

// Blocks whose value gap to the maximum could close within a step of length
// `radius`: gap_j <= max(1e-8 (1 + J), radius |f_j - f_top|).
SubgradientBundle local_bundle(const std::vector<BlockGradient>& blocks, double radius) {
    const std::size_t top = top_block(blocks);
    SubgradientBundle b;
    b.value = blocks[top].value;
    b.tie_tolerance = default_tie_tolerance(b.value);
    for (const auto& blk : blocks) {
        const double gap = b.value - blk.value;
        const double reach = radius * (blk.gradient - blocks[top].gradient).norm();
        const double tol = std::max(default_tie_tolerance(b.value), reach);
        if (gap <= tol) {
            b.blocks.push_back(blk);
            b.tie_tolerance = std::max(b.tie_tolerance, gap);
        }
    }
    return b;
}

SubgradientBundle tie_bundle(const Problem& problem, const Vector& u) {
    const auto blocks = problem.objective->blocks(u);
    double value = -kInf;
    for (const auto& b : blocks) value = std::max(value, b.value);
    return make_bundle(blocks, default_tie_tolerance(value));
}

}  // namespace

SolveReport subgradient_method(const Problem& problem, const Vector& u0, StepSchedule schedule,
                               int iterations) {
    const auto start = std::chrono::steady_clock::now();
    if (u0.size() != problem.dim()) throw Error(ErrorCode::DimensionMismatch, "u0 length");
    SolveReport rep;
    Vector u = u0;
    double F = problem.value(u);
    if (!std::isfinite(F)) throw Error(ErrorCode::NonHurwitz, "start point is not stabilizing or feasible");
    Vector best = u;
    double best_F = F;
    rep.trace.push_back(F);

    for (int k = 1; k <= iterations; ++k) {
        const auto blocks = problem.objective->blocks(u);
        Vector d = blocks[top_block(blocks)].gradient + problem.smooth_gradient(u);
        if (problem.reg.kind() == Regularizer::Kind::WeightedL1) {
            d += problem.reg.gamma() * problem.reg.weights().cwiseProduct(u.cwiseSign());
        }
        u -= schedule.at(k) * d;
        if (problem.reg.kind() == Regularizer::Kind::Constraint) u = problem.reg.set().project(u);
        else if (problem.reg.kind() == Regularizer::Kind::WeightedL1 && problem.reg.nonneg()) u = u.cwiseMax(0.0);

        F = problem.value(u);
        rep.trace.push_back(F);
        if (!std::isfinite(F)) {
            u = best;  // left the stability region; restart from the best point
        } else if (F < best_F) {
            best_F = F;
            best = u;
        }
        rep.iterations = k;
    }

    rep.u = best;
    rep.termination = Termination::MaxIter;
    if (problem.reg.kind() == Regularizer::Kind::None) {
        rep.stationarity = stationarity_check(tie_bundle(problem, best), problem.smooth_gradient(best));
    }
    rep.wall_time = seconds_since(start);
    return rep;
}

SolveReport optimal_subgradient_descent(const Problem& problem, const Vector& u0,
                                        const SolverOptions& opts) {
    const auto start = std::chrono::steady_clock::now();
    if (problem.reg.kind() != Regularizer::Kind::None) {
        throw Error(ErrorCode::InvalidArgument,
                    "optimal-subgradient descent takes a differentiable penalty only; use mm_solver for g");
    }
    if (u0.size() != problem.dim()) throw Error(ErrorCode::DimensionMismatch, "u0 length");

    SolveReport rep;
    Vector u = u0;
    double F = problem.smooth_value(u);
    if (!std::isfinite(F)) throw Error(ErrorCode::NonHurwitz, "start point is not stabilizing");
    rep.trace.push_back(F);
    rep.termination = Termination::MaxIter;

    double t = opts.initial_step;
    double last_step = 0.0;
    // Stationarity is evaluated before the iteration limit so the report
    // always describes the returned point. Only accepted steps count as
    // iterations; bundle narrowing ends at the floor radius.
    for (;;) {
        const auto blocks = problem.objective->blocks(u);
        const Vector grad_s = problem.smooth_gradient(u);
        const double floor = 1e-7 * (1.0 + u.norm());

        rep.stationarity = stationarity_check(local_bundle(blocks, floor), grad_s);
        if (rep.stationarity <= opts.tol) {
            rep.termination = Termination::Stationary;
            break;
        }
        if (rep.iterations >= opts.max_iter) break;

        const double radius = std::max(last_step, floor);
        const DescentDirection dir = optimal_subgradient_direction(local_bundle(blocks, radius), grad_s);
        if (!dir.certified_descent) {
            if (radius > floor) {
                last_step = 0.1 * radius;  // too wide a bundle; narrow it and retry
                continue;
            }
            rep.termination = Termination::NoProgress;
            break;
        }

        bool accepted = false;
        double step = std::min(2.0 * t, 1e6);
        Vector u_next;
        double F_next = kInf;
        for (int h = 0; h <= opts.max_halvings; ++h) {
            u_next = u + step * dir.v;
            F_next = problem.smooth_value(u_next);
            if (std::isfinite(F_next) && F_next < F && F_next <= F + opts.armijo * step * dir.slope) {
                accepted = true;
                break;
            }
            step *= opts.backtrack;
        }
        if (!accepted) {
            // Below sqrt(eps) |F| the predicted decrease is lost in the rounding
            // of F itself; that is the end of resolvable progress, not a stall.
            const bool resolvable = -dir.slope > 1.5e-8 * (1.0 + std::fabs(F));
            if (opts.throw_on_stall && resolvable) {
                throw Error(ErrorCode::LineSearchStall,
                            "certified descent direction failed the line search after " +
                                std::to_string(opts.max_halvings) + " halvings");
            }
            rep.termination = Termination::NoProgress;
            break;
        }
        t = step;
        last_step = step * dir.v.norm();
        u = u_next;
        F = F_next;
        rep.trace.push_back(F);
        ++rep.iterations;
        if (opts.on_iteration) opts.on_iteration(rep.iterations, F);
    }

    rep.u = u;
    rep.wall_time = seconds_since(start);
    return rep;
}

}  // namespace posctl
