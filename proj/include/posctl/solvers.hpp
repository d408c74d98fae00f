#pragma once

// Projections, proximal operators and first-order methods for
//
//     minimize  J(u) + s(u) + g(u)
//
// where J is the H2 or H-infinity performance of a positive system, s is a
// differentiable penalty (for instance u^T R u) and g is either a constraint
// indicator or a weighted l1 norm handled through its proximal operator.

#include "posctl/metrics.hpp"
#include "posctl/possys.hpp"
#include "posctl/types.hpp"

#include <functional>
#include <memory>
#include <string_view>
#include <vector>

namespace posctl {

// ---------------------------------------------------------------- projections

// Euclidean projection onto {u >= 0, sum(u) = total}.
Vector project_simplex(const Vector& y, double total);

// Euclidean projection onto the capped simplex {0 <= u <= kappa, sum(u) = N kappa}.
Vector project_capped_simplex(const Vector& y, int N, double kappa);

// Capped simplex intersected with {sum_{i in S_j} u_i >= kappa} for disjoint
// subsets S_j. Dykstra's alternating projections followed by an exact
// active-set solve of the KKT system; throws MaxAlternations if Dykstra does
// not settle within 1e5 sweeps and no exact solution is found.
Vector project_with_subset_floors(const Vector& y, int N, double kappa,
                                  const std::vector<std::vector<int>>& subsets);

// sign(y_i) max(|y_i| - t w_i, 0)
Vector prox_l1(const Vector& y, double t, const Vector& w);

// max(y_i - t w_i, 0): prox of t sum w_i u_i restricted to u >= 0.
Vector prox_l1_nonneg(const Vector& y, double t, const Vector& w);

struct ConstraintSet {
    enum class Kind { Nonneg, Simplex, CappedSimplex, CappedWithFloors, Box };

    Kind kind = Kind::Nonneg;
    double total = 1.0;  // Simplex
    int N = 1;           // capped variants
    double kappa = 1.0;  // capped variants
    std::vector<std::vector<int>> subsets;
    Vector lo, hi;       // Box

    static ConstraintSet nonneg() { return {}; }
    static ConstraintSet simplex(double total);
    static ConstraintSet capped(int N, double kappa);
    static ConstraintSet capped_with_floors(int N, double kappa, std::vector<std::vector<int>> subsets);
    static ConstraintSet box(Vector lo, Vector hi);

    // Throws InvalidArgument when the parameters describe an empty or
    // malformed set for dimension n.
    void check(Eigen::Index n) const;
    Vector project(const Vector& y) const;
    bool contains(const Vector& u, double tol = 1e-9) const;
};

// g(u): nothing, the indicator of a constraint set, or gamma sum_i w_i |u_i|
// (optionally restricted to u >= 0).
class Regularizer {
public:
    enum class Kind { None, Constraint, WeightedL1 };

    static Regularizer none() { return Regularizer(); }
    static Regularizer constraint(ConstraintSet set);
    static Regularizer weighted_l1(double gamma, Vector weights, bool nonneg = false);

    Kind kind() const { return kind_; }
    const ConstraintSet& set() const { return set_; }
    double gamma() const { return gamma_; }
    const Vector& weights() const { return weights_; }
    bool nonneg() const { return nonneg_; }

    double value(const Vector& u) const;     // +inf outside a constraint set
    Vector prox(const Vector& y, double t) const;  // prox_{t g}(y)
    // Moreau envelope  min_v g(v) + |v - x|^2 / (2 mu)  and its gradient.
    double envelope(const Vector& x, double mu) const;
    Vector envelope_gradient(const Vector& x, double mu) const;

private:
    Kind kind_ = Kind::None;
    ConstraintSet set_;
    double gamma_ = 0.0;
    Vector weights_;
    bool nonneg_ = false;
};

// ----------------------------------------------------------------- objectives

// The performance term J. Values are +inf off the Hurwitz set; `blocks` must
// only be called where the value is finite.
class Objective {
public:
    virtual ~Objective() = default;
    virtual Eigen::Index dim() const = 0;
    virtual double value(const Vector& u) const = 0;
    // One gradient per block of the max structure (a single entry for smooth
    // objectives).
    virtual std::vector<BlockGradient> blocks(const Vector& u) const = 0;
    virtual bool smooth() const = 0;
    virtual std::string_view name() const = 0;
};

class J2Objective final : public Objective {
public:
    explicit J2Objective(PositiveSystem sys) : sys_(std::move(sys)) {}
    Eigen::Index dim() const override { return sys_.controls(); }
    double value(const Vector& u) const override { return j2(sys_, u); }
    std::vector<BlockGradient> blocks(const Vector& u) const override;
    bool smooth() const override { return true; }
    std::string_view name() const override { return "h2"; }

private:
    PositiveSystem sys_;
};

class JinfObjective final : public Objective {
public:
    explicit JinfObjective(PositiveSystem sys);
    Eigen::Index dim() const override { return sys_.controls(); }
    double value(const Vector& u) const override { return jinf(sys_, u); }
    std::vector<BlockGradient> blocks(const Vector& u) const override;
    // Differentiable when G(A) is weakly connected (a single block).
    bool smooth() const override { return structure_.blocks.size() == 1; }
    std::string_view name() const override { return "hinf"; }

private:
    PositiveSystem sys_;
    BlockStructure structure_;
};

enum class Metric { H2, Hinf };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);  // "h2" | "hinf"

std::shared_ptr<const Objective> make_objective(const PositiveSystem& sys, Metric metric);

// Differentiable penalty s(u).
struct SmoothTerm {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;

    bool empty() const { return !value; }
};

// u^T R u with gradient (R + R^T) u.
SmoothTerm quadratic_term(const Matrix& R);

struct Problem {
    std::shared_ptr<const Objective> objective;
    SmoothTerm smooth;
    Regularizer reg;

    Eigen::Index dim() const { return objective->dim(); }
    double smooth_value(const Vector& u) const;  // J + s
    Vector smooth_gradient(const Vector& u) const;  // grad s only
    double value(const Vector& u) const;  // J + s + g
};

// -------------------------------------------------------------------- solvers

enum class Termination { Stationary, MaxIter, Diverged, Infeasible, NoProgress };

std::string_view to_string(Termination t);

struct SolverOptions {
    int max_iter = 500;
    double tol = 1e-6;
    double initial_step = 1.0;
    double armijo = 1e-4;
    double backtrack = 0.5;
    int max_halvings = 60;
    bool barzilai_borwein = true;
    // multipliers
    double mu0 = 1.0;
    int max_outer = 200;
    int max_inner = 500;
    // optimal-subgradient descent: throw LineSearchStall (true) or stop with
    // NoProgress (false) when a certified direction fails the line search.
    bool throw_on_stall = true;
    std::function<void(int iteration, double objective)> on_iteration;
};

struct SolveReport {
    Vector u;
    std::vector<double> trace;  // objective per iteration, trace[0] at the start point
    double stationarity = kInf;
    int iterations = 0;
    Termination termination = Termination::MaxIter;
    double wall_time = 0.0;  // seconds
};

// Proximal gradient with Armijo backtracking on the smooth part and a
// Barzilai-Borwein initial step. Requires a smooth objective.
SolveReport proximal_gradient(const Problem& problem, const Vector& u0, const SolverOptions& opts = {});

struct StepSchedule {
    enum class Kind { Constant, Diminishing };
    Kind kind = Kind::Constant;
    double s = 1e-2;

    double at(int k) const { return kind == Kind::Constant ? s : s / static_cast<double>(k); }
};

// u_{k+1} = u_k - s_k (f + grad s + subgradient of g), projected when g is a
// constraint indicator. No descent guarantee; reports the best point seen.
SolveReport subgradient_method(const Problem& problem, const Vector& u0, StepSchedule schedule,
                               int iterations);

// Descent along the optimal subgradient (an LP over the active bundle) with
// Armijo backtracking; stops when the stationarity residual <= opts.tol.
// Requires g = none.
SolveReport optimal_subgradient_descent(const Problem& problem, const Vector& u0,
                                        const SolverOptions& opts = {});

// Method of multipliers on the proximal augmented Lagrangian of
// J + s + g with the split u = v. Inner minimizations use optimal-subgradient
// descent on J + s + Moreau envelope. Returns the split variable v, which lies
// in the domain of g.
SolveReport mm_solver(const Problem& problem, const Vector& u0, const Vector& lambda0,
                      const SolverOptions& opts = {});

}  // namespace posctl
