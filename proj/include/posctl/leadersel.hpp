#pragma once

// Choosing N leaders of weight kappa in a directed consensus network so that
// the H2 or H-infinity norm of  dx/dt = -(L + kappa diag(1_S)) x + d  is
// small: a convex relaxation for the lower bound, rounding and swap
// heuristics and an undirected surrogate for the upper bounds, and an
// exhaustive oracle for small networks.

#include "posctl/netgraph.hpp"
#include "posctl/solvers.hpp"

#include <string>
#include <vector>

namespace posctl {

struct LeaderProblem {
    DirectedNetwork net;
    int N = 1;
    double kappa = 1.0;
    Metric metric = Metric::H2;

    void check() const;  // 1 <= N <= n, kappa > 0
};

struct LeaderResult {
    std::vector<int> leaders;  // sorted, 0-based
    Vector u;                  // kappa on leaders, 0 elsewhere
    double J = kInf;
    double J_lb = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();  // J / J_lb - 1
    std::string method;
    std::vector<std::string> warnings;
};

// True iff every leader subset (source component) contains a leader.
bool is_stabilizing(const DirectedNetwork& net, const std::vector<int>& leaders);

Vector leader_vector(int n, const std::vector<int>& leaders, double kappa);

// J of the 0/kappa leader vector; +inf when not stabilizing.
double leader_objective(const LeaderProblem& p, const std::vector<int>& leaders);

struct LowerBound {
    double J_lb = kInf;
    Vector u_relaxed;
    SolveReport report;
};

// Minimizes J over the capped simplex with one unit of kappa forced into each
// leader subset. Throws Infeasible when N is below the number of subsets.
LowerBound lower_bound(const LeaderProblem& p, const SolverOptions& opts = {});

// Largest relaxed entry of each leader subset, then the N - k largest of the
// rest; ties go to the lower node index.
std::vector<int> round_candidates(const Vector& u_relaxed, const LeaderProblem& p);

// Best-improvement swaps of one leader for one follower while J improves by
// more than 1e-10 relative.
std::vector<int> greedy_swap(std::vector<int> leaders, const LeaderProblem& p);

// Bound value of every candidate set, in lexicographic enumeration order.
// With rank_one = true the inverses are propagated by Sherman-Morrison
// updates, otherwise each candidate is factorized directly. Throws
// RegimeUnsupported unless N <= 3 or N >= n - 3.
struct CandidateScore {
    std::vector<int> leaders;
    double score = kInf;  // +inf when the symmetric part is not positive definite
};
std::vector<CandidateScore> undirected_scores(const LeaderProblem& p, bool rank_one = true);

// Arg-min of the symmetric-part bound (trace for H2, largest eigenvalue for
// H-infinity) over all candidate sets.
std::vector<int> undirected_candidates(const LeaderProblem& p);

// Exact optimum over all stabilizing N-subsets; throws TooLarge when
// C(n, N) > 1e6. threads <= 0 uses the hardware concurrency.
LeaderResult exhaustive_oracle(const LeaderProblem& p, int threads = 0);

enum class Strategy { Round, RoundSwap, Undirected, BestOf, Exhaustive };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view text);  // round|swap|undirected|best-of|exhaustive

LeaderResult select_leaders(const LeaderProblem& p, Strategy strategy, const SolverOptions& opts = {},
                            int threads = 0);

}  // namespace posctl
