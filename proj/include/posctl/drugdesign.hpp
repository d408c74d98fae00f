#pragma once

// Combination-dose design: minimize H2 or H-infinity of a positive system
// whose closed loop is A + diag(D u), either under a dose budget or through a
// reweighted-l1 homotopy that trades performance for fewer drugs.

#include "posctl/error.hpp"
#include "posctl/possys.hpp"
#include "posctl/solvers.hpp"

#include <vector>

namespace posctl {

struct TherapyProblem {
    PositiveSystem sys;
    Metric metric = Metric::H2;
    Matrix R;  // quadratic dose penalty u^T R u; empty for none

    void check() const;  // validates the system and R (symmetric positive definite)
};

// Minimizes J over {u >= 0, sum(u) = budget}. Starts at the barycenter, or at
// the first stabilizing vertex; throws Infeasible if none stabilizes.
SolveReport budget_design(const TherapyProblem& p, double budget, const SolverOptions& opts = {});

struct PolishResult {
    std::vector<int> support;  // sorted, 0-based
    Vector u;                  // exactly zero off the support
    double J = kInf;           // performance term
    double objective = kInf;   // J + u^T R u, the minimized value
};

// Re-optimizes J + u^T R u over u >= 0 supported on `support`. Throws
// Infeasible when no dose c * 1_S with c <= 1e6 stabilizes.
PolishResult polish(const TherapyProblem& p, const std::vector<int>& support, const SolverOptions& opts = {});

struct HomotopyPoint {
    double gamma = 0.0;
    Vector u;
    int cardinality = 0;
    double J = kInf;
    int reweights = 0;
};

struct HomotopyPath {
    std::vector<HomotopyPoint> points;
    std::vector<PolishResult> polished;  // one per cardinality met, dense first
    double epsilon = 0.0;
    bool reached = false;
};

inline constexpr double kCardinalityThreshold = 1e-8;

int cardinality(const Vector& u);
std::vector<int> support_of(const Vector& u);

// Default gamma grid: 50 points logarithmically spaced in [0.01, 10].
std::vector<double> default_gamma_grid();

// Reweighted l1:  u_gamma = argmin_{u >= 0} J + u^T R u + gamma sum w_i u_i,
// w_i = 1 / (u_i + eps), at most five reweights per gamma, warm-started
// along the grid until card(u) <= target. eps <= 0 selects
// 1e-4 |u_dense|_1.
HomotopyPath sparsity_homotopy(const TherapyProblem& p, int target, std::vector<double> gammas = {},
                               double eps = 0.0, const SolverOptions& opts = {});

// Thrown by sparsity_homotopy when the last gamma still leaves more than
// `target` drugs; carries the path computed so far.
class HomotopyError : public Error {
public:
    HomotopyError(const std::string& what, HomotopyPath path)
        : Error(ErrorCode::TargetUnreachable, what), path_(std::move(path)) {}
    const HomotopyPath& path() const { return path_; }

private:
    HomotopyPath path_;
};

struct DegradationRow {
    int N = 0;
    double percent = 0.0;  // 100 (objective_N / objective_dense - 1)
};

// One row per polished cardinality, ascending in N.
std::vector<DegradationRow> degradation_report(const HomotopyPath& path);

}  // namespace posctl
