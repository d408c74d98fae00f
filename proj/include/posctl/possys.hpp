#pragma once

// Positive LTI model  dx/dt = (A + K(u)) x + B d,  z = C x  with the
// diagonal structure operator K(u) = diag(D u).

#include "posctl/types.hpp"

#include <string>
#include <vector>

namespace posctl {

// Control input u (doses or leader weights). Feasibility such as u >= 0 is
// imposed by the constraint set of a given problem, not here.
using ControlVector = Vector;

struct PositiveSystem {
    Matrix A;  // n x n, Metzler
    Matrix B;  // n x p, nonnegative
    Matrix C;  // q x n, nonnegative
    Matrix D;  // n x m, any sign

    Eigen::Index states() const { return A.rows(); }
    Eigen::Index controls() const { return D.cols(); }
};

struct Violation {
    std::string matrix;  // "A", "B", "C", "D" or "dims"
    Eigen::Index row = -1;
    Eigen::Index col = -1;
    double value = 0.0;
    std::string message;
};

// Off-diagonal entries of A down to this value still count as Metzler.
inline constexpr double kMetzlerTol = -1e-12;

// Reports (never repairs) every invariant violation.
std::vector<Violation> validate(const PositiveSystem& sys);

// A + diag(D u).
Matrix closed_loop(const PositiveSystem& sys, const ControlVector& u);

// K^dagger(X) = D^T diag(X), the adjoint of K under the trace inner product.
Vector adjoint_K(const PositiveSystem& sys, const Matrix& X);

// A = -L, B = C = I, D = -I: consensus dynamics with leader feedback.
PositiveSystem leader_system(const Matrix& laplacian);

}  // namespace posctl
