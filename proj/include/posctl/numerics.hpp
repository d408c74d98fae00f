#pragma once

// Dense linear-algebra and LP kernels: Lyapunov solves, spectral abscissa,
// the principal singular triplet and a small two-phase simplex solver.

#include "posctl/types.hpp"

#include <string_view>

namespace posctl {

// Solves A X + X A^T + Q = 0 by Bartels-Stewart back-substitution on the
// complex Schur form of A. Throws NonHurwitz if spectral_abscissa(A) >= -1e-12.
Matrix solve_lyapunov(const Matrix& A, const Matrix& Q);

// max Re(lambda) over the eigenvalues of A.
double spectral_abscissa(const Matrix& A);

inline bool is_hurwitz(const Matrix& A) { return spectral_abscissa(A) < kHurwitzMargin; }

struct SvdTriplet {
    double sigma = 0.0;
    Vector left;   // w, unit norm
    Vector right;  // v, unit norm
};

// Largest singular value and its vectors, w^T M v = sigma. The pair is
// sign-normalized so that the largest-magnitude entry of w is positive; for
// elementwise nonnegative M both vectors come out nonnegative.
SvdTriplet principal_svd(const Matrix& M);

// minimize c^T x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= lower
// lower entries may be -inf (free variables). An empty `lower` means x >= 0.
struct LpProblem {
    Vector c;
    Matrix A_ub;
    Vector b_ub;
    Matrix A_eq;
    Vector b_eq;
    Vector lower;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus status);

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Vector x;
    double objective = 0.0;
    // Lagrange multipliers of the original rows (sign convention of
    // L = c^T x + y_ub^T (A_ub x - b_ub) + y_eq^T (A_eq x - b_eq) with
    // y_ub >= 0 at optimality).
    Vector dual_ub;
    Vector dual_eq;
    int iterations = 0;
};

// Dense two-phase simplex with Bland's rule. Throws NumericalBreakdown if the
// pivot budget is exhausted.
LpResult solve_lp(const LpProblem& problem);

}  // namespace posctl
