#include "posctl/leadersel.hpp"

#include "posctl/error.hpp"
#include "posctl/metrics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

namespace posctl {

namespace {

double evaluate(const PositiveSystem& sys, Metric metric, const Vector& u) {
    return metric == Metric::H2 ? j2(sys, u) : jinf(sys, u);
}

bool lex_less(double Ja, const std::vector<int>& a, double Jb, const std::vector<int>& b) {
    if (Ja != Jb) return Ja < Jb;
    return a < b;
}

// Calls f(combination) for every r-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_combination(int n, int r, F&& f) {
    std::vector<int> c(static_cast<std::size_t>(r));
    std::iota(c.begin(), c.end(), 0);
    if (r > n) return;
    while (true) {
        f(c);
        int i = r - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == n - r + i) --i;
        if (i < 0) return;
        ++c[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < r; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
}

double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Bound score from the inverse of the symmetric part.
double score_from_inverse(const Matrix& Minv, Metric metric) {
    if (metric == Metric::H2) return 0.5 * Minv.trace();
    Eigen::SelfAdjointEigenSolver<Matrix> es(Minv, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

double direct_score(const Matrix& Ls, const std::vector<int>& leaders, double kappa, bool complement,
                    Metric metric) {
    const Eigen::Index n = Ls.rows();
    Vector u = Vector::Constant(n, complement ? kappa : 0.0);
    for (int i : leaders) u(i) = complement ? 0.0 : kappa;
    try {
        const SymmetricPartBounds b = symmetric_part_bounds(Ls, u);
        return metric == Metric::H2 ? b.j2_bound : b.jinf_bound;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::Singular) return kInf;
        throw;
    }
}

// (M + c e_i e_i^T)^{-1} from M^{-1}; returns false when the update loses
// positive definiteness.
bool rank_one_update(const Matrix& Minv, int i, double c, Matrix& out) {
    const double denom = 1.0 + c * Minv(i, i);
    if (!(denom > 1e-12)) return false;
    const Vector col = Minv.col(i);
    out = Minv - (c / denom) * col * col.transpose();
    return true;
}

}  // namespace

void LeaderProblem::check() const {
    if (N < 1 || N > net.size()) throw Error(ErrorCode::InvalidArgument, "need 1 <= N <= n");
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
}

bool is_stabilizing(const DirectedNetwork& net, const std::vector<int>& leaders) {
    std::vector<char> is_leader(static_cast<std::size_t>(net.size()), 0);
    for (int l : leaders) {
        if (l < 0 || l >= net.size()) throw Error(ErrorCode::InvalidArgument, "leader index out of range");
        is_leader[static_cast<std::size_t>(l)] = 1;
    }
    for (const auto& s : net.leader_subsets().subsets) {
        if (std::none_of(s.begin(), s.end(), [&](int v) { return is_leader[static_cast<std::size_t>(v)]; })) {
            return false;
        }
    }
    return true;
}

Vector leader_vector(int n, const std::vector<int>& leaders, double kappa) {
    Vector u = Vector::Zero(n);
    for (int l : leaders) u(l) = kappa;
    return u;
}

double leader_objective(const LeaderProblem& p, const std::vector<int>& leaders) {
    if (!is_stabilizing(p.net, leaders)) return kInf;
    const PositiveSystem sys = leader_system(p.net.laplacian());
    return evaluate(sys, p.metric, leader_vector(p.net.size(), leaders, p.kappa));
}

LowerBound lower_bound(const LeaderProblem& p, const SolverOptions& opts) {
    p.check();
    const auto& subsets = p.net.leader_subsets().subsets;
    if (static_cast<int>(subsets.size()) > p.N) {
        throw Error(ErrorCode::Infeasible, "N = " + std::to_string(p.N) + " is below the number of leader subsets (" +
                                               std::to_string(subsets.size()) + ")");
    }
    const int n = p.net.size();
    const ConstraintSet set = ConstraintSet::capped_with_floors(p.N, p.kappa, subsets);
    // Analytic center of the capped simplex, floors restored by projection.
    const Vector u0 = set.project(Vector::Constant(n, p.N * p.kappa / n));

    const PositiveSystem sys = leader_system(p.net.laplacian());
    Problem prob{make_objective(sys, p.metric), SmoothTerm{}, Regularizer::constraint(set)};

    LowerBound out;
    if (prob.objective->smooth()) {
        out.report = proximal_gradient(prob, u0, opts);
    } else {
        SolverOptions mm = opts;
        mm.tol = std::max(opts.tol, 1e-6);
        out.report = mm_solver(prob, u0, Vector(), mm);
    }
    out.u_relaxed = out.report.u;
    out.J_lb = prob.objective->value(out.u_relaxed);
    return out;
}

std::vector<int> round_candidates(const Vector& u_relaxed, const LeaderProblem& p) {
    p.check();
    const int n = p.net.size();
    if (u_relaxed.size() != n) throw Error(ErrorCode::DimensionMismatch, "relaxed vector length");
    auto better = [&](int a, int b) {
        return u_relaxed(a) > u_relaxed(b) || (u_relaxed(a) == u_relaxed(b) && a < b);
    };
    std::vector<char> chosen(static_cast<std::size_t>(n), 0);
    std::vector<int> out;
    for (const auto& s : p.net.leader_subsets().subsets) {
        const int pick = *std::min_element(s.begin(), s.end(), better);
        chosen[static_cast<std::size_t>(pick)] = 1;
        out.push_back(pick);
    }
    std::vector<int> rest;
    for (int i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) rest.push_back(i);
    }
    std::sort(rest.begin(), rest.end(), better);
    for (std::size_t k = 0; static_cast<int>(out.size()) < p.N && k < rest.size(); ++k) out.push_back(rest[k]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> greedy_swap(std::vector<int> leaders, const LeaderProblem& p) {
    p.check();
    std::sort(leaders.begin(), leaders.end());
    const int n = p.net.size();
    const PositiveSystem sys = leader_system(p.net.laplacian());
    auto J_of = [&](const std::vector<int>& s) {
        return is_stabilizing(p.net, s) ? evaluate(sys, p.metric, leader_vector(n, s, p.kappa)) : kInf;
    };
    double J = J_of(leaders);
    while (true) {
        std::vector<char> is_leader(static_cast<std::size_t>(n), 0);
        for (int l : leaders) is_leader[static_cast<std::size_t>(l)] = 1;
        double best_J = J;
        std::vector<int> best;
        for (std::size_t a = 0; a < leaders.size(); ++a) {
            for (int m = 0; m < n; ++m) {
                if (is_leader[static_cast<std::size_t>(m)]) continue;
                std::vector<int> cand = leaders;
                cand[a] = m;
                std::sort(cand.begin(), cand.end());
                const double Jc = J_of(cand);
                if (Jc < best_J) {
                    best_J = Jc;
                    best = std::move(cand);
                }
            }
        }
        if (best.empty() || !(best_J < J - 1e-10 * std::fabs(J))) break;
        leaders = std::move(best);
        J = best_J;
    }
    return leaders;
}

std::vector<CandidateScore> undirected_scores(const LeaderProblem& p, bool rank_one) {
    p.check();
    const int n = p.net.size();
    const bool few = p.N <= 3;
    const bool many = p.N >= n - 3;
    if (!few && !many) {
        throw Error(ErrorCode::RegimeUnsupported,
                    "undirected enumeration covers N <= 3 or N >= n - 3 only");
    }
    const Matrix L = p.net.laplacian();
    const Matrix Ls = 0.5 * (L + L.transpose());
    const int r = few ? p.N : n - p.N;       // size of the enumerated set
    const double c = few ? p.kappa : -p.kappa;  // adding leaders or removing them
    std::vector<CandidateScore> out;

    auto leaders_of = [&](const std::vector<int>& comb) {
        if (few) return comb;
        std::vector<int> lead;
        std::size_t k = 0;
        for (int i = 0; i < n; ++i) {
            if (k < comb.size() && comb[k] == i) ++k;
            else lead.push_back(i);
        }
        return lead;
    };

    // Rank-one propagation needs an invertible starting point: Ls + kappa I in
    // the many-leader regime, Ls + kappa e_i e_i^T in the few-leader regime
    // (invertible only when the undirected graph is connected).
    Matrix base_inv;
    bool use_rank_one = rank_one && (many && !few ? true : p.net.is_weakly_connected());
    if (use_rank_one && !few) {
        Matrix M = Ls;
        M.diagonal().array() += p.kappa;
        const Eigen::LLT<Matrix> llt(M);
        use_rank_one = llt.info() == Eigen::Success;
        if (use_rank_one) base_inv = llt.solve(Matrix::Identity(n, n));
    }
    if (!use_rank_one || r == 0) {
        for_each_combination(n, r, [&](const std::vector<int>& comb) {
            out.push_back({leaders_of(comb), direct_score(Ls, comb, p.kappa, !few, p.metric)});
        });
        return out;
    }

    std::vector<int> comb;
    // Depth-first enumeration carrying the running inverse.
    auto recurse = [&](auto&& self, const Matrix& Minv, bool valid, int start) -> void {
        if (static_cast<int>(comb.size()) == r) {
            // A broken chain (indefinite intermediate) does not make the set infeasible.
            out.push_back({leaders_of(comb), valid ? score_from_inverse(Minv, p.metric)
                                                   : direct_score(Ls, comb, p.kappa, !few, p.metric)});
            return;
        }
        for (int i = start; i < n; ++i) {
            comb.push_back(i);
            Matrix next;
            bool ok = valid;
            if (few && comb.size() == 1) {
                Matrix M = Ls;
                M(i, i) += p.kappa;
                const Eigen::LLT<Matrix> llt(M);
                ok = llt.info() == Eigen::Success;
                if (ok) next = llt.solve(Matrix::Identity(n, n));
            } else if (ok) {
                ok = rank_one_update(Minv, i, c, next);
            }
            self(self, next, ok, i + 1);
            comb.pop_back();
        }
    };
    recurse(recurse, base_inv, true, 0);
    return out;
}

std::vector<int> undirected_candidates(const LeaderProblem& p) {
    const auto scores = undirected_scores(p, true);
    const CandidateScore* best = nullptr;
    for (const auto& s : scores) {
        if (std::isfinite(s.score) && (!best || s.score < best->score)) best = &s;
    }
    if (!best) throw Error(ErrorCode::Infeasible, "no candidate set makes the symmetric part positive definite");
    return best->leaders;
}

LeaderResult exhaustive_oracle(const LeaderProblem& p, int threads) {
    p.check();
    const int n = p.net.size();
    if (binomial(n, p.N) > 1e6) {
        throw Error(ErrorCode::TooLarge, "C(n, N) exceeds the exhaustive-search cap of 1e6");
    }
    std::vector<std::vector<int>> all;
    for_each_combination(n, p.N, [&](const std::vector<int>& c) {
        if (is_stabilizing(p.net, c)) all.push_back(c);
    });
    if (all.empty()) throw Error(ErrorCode::Infeasible, "no stabilizing leader set of this size");

    const PositiveSystem sys = leader_system(p.net.laplacian());
    const int workers = std::max(1, std::min<int>(resolve_threads(threads), static_cast<int>(all.size())));
    std::vector<double> J(all.size(), kInf);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < all.size(); k = next++) {
            J[k] = evaluate(sys, p.metric, leader_vector(n, all[k], p.kappa));
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();

    std::size_t best = 0;
    for (std::size_t k = 1; k < all.size(); ++k) {
        if (lex_less(J[k], all[k], J[best], all[best])) best = k;
    }
    LeaderResult out;
    out.leaders = all[best];
    out.u = leader_vector(n, out.leaders, p.kappa);
    out.J = J[best];
    out.method = "exhaustive";
    return out;
}

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::Round: return "round";
    case Strategy::RoundSwap: return "swap";
    case Strategy::Undirected: return "undirected";
    case Strategy::BestOf: return "best-of";
    case Strategy::Exhaustive: return "exhaustive";
    }
    return "unknown";
}

Strategy parse_strategy(std::string_view text) {
    if (text == "round") return Strategy::Round;
    if (text == "swap" || text == "round+swap") return Strategy::RoundSwap;
    if (text == "undirected") return Strategy::Undirected;
    if (text == "best-of") return Strategy::BestOf;
    if (text == "exhaustive") return Strategy::Exhaustive;
    throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(text) + "'");
}

LeaderResult select_leaders(const LeaderProblem& p, Strategy strategy, const SolverOptions& opts, int threads) {
    p.check();
    const LowerBound lb = lower_bound(p, opts);
    const int n = p.net.size();

    auto make = [&](std::vector<int> set, std::string method) {
        LeaderResult r;
        r.leaders = std::move(set);
        r.u = leader_vector(n, r.leaders, p.kappa);
        r.J = leader_objective(p, r.leaders);
        r.method = std::move(method);
        return r;
    };

    LeaderResult out;
    std::vector<std::string> warnings;
    const std::vector<int> rounded = round_candidates(lb.u_relaxed, p);
    switch (strategy) {
    case Strategy::Round: out = make(rounded, "round"); break;
    case Strategy::RoundSwap: out = make(greedy_swap(rounded, p), "swap"); break;
    case Strategy::Undirected:
        try {
            out = make(undirected_candidates(p), "undirected");
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RegimeUnsupported) throw;
            warnings.push_back("undirected surrogate unsupported for this N; fell back to rounding");
            out = make(rounded, "round");
        }
        break;
    case Strategy::BestOf: {
        std::vector<LeaderResult> cands;
        cands.push_back(make(rounded, "round"));
        cands.push_back(make(greedy_swap(rounded, p), "swap"));
        try {
            cands.push_back(make(undirected_candidates(p), "undirected"));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::RegimeUnsupported) throw;
            warnings.push_back("undirected surrogate skipped: unsupported for this N");
        }
        out = cands.front();
        for (const auto& c : cands) {
            if (lex_less(c.J, c.leaders, out.J, out.leaders)) out = c;
        }
        break;
    }
    case Strategy::Exhaustive: out = exhaustive_oracle(p, threads); break;
    }
    out.J_lb = lb.J_lb;
    out.gap = out.J / out.J_lb - 1.0;
    out.warnings.insert(out.warnings.end(), warnings.begin(), warnings.end());
    return out;
}

}  // namespace posctl
