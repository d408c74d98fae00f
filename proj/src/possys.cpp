#include "posctl/possys.hpp"

#include "posctl/error.hpp"

#include <cmath>

namespace posctl {

std::vector<Violation> validate(const PositiveSystem& sys) {
    std::vector<Violation> out;
    const Eigen::Index n = sys.A.rows();
    auto dims = [&](const std::string& msg) { out.push_back({"dims", -1, -1, 0.0, msg}); };
    if (sys.A.cols() != n) dims("A must be square");
    if (sys.B.rows() != n) dims("B must have as many rows as A");
    if (sys.C.cols() != n) dims("C must have as many columns as A");
    if (sys.D.rows() != n) dims("D must have as many rows as A");
    if (n == 0) dims("system must have at least one state");

    auto check = [&](const Matrix& M, const std::string& name, bool skip_diag, double floor) {
        for (Eigen::Index i = 0; i < M.rows(); ++i) {
            for (Eigen::Index j = 0; j < M.cols(); ++j) {
                const double v = M(i, j);
                if (!std::isfinite(v)) {
                    out.push_back({name, i, j, v, "non-finite entry"});
                } else if (!(skip_diag && i == j) && v < floor) {
                    out.push_back({name, i, j, v, skip_diag ? "negative off-diagonal (not Metzler)"
                                                            : "negative entry"});
                }
            }
        }
    };
    check(sys.A, "A", true, kMetzlerTol);
    check(sys.B, "B", false, 0.0);
    check(sys.C, "C", false, 0.0);
    check(sys.D, "D", false, -kInf);
    return out;
}

Matrix closed_loop(const PositiveSystem& sys, const ControlVector& u) {
    if (u.size() != sys.D.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "control has " + std::to_string(u.size()) +
                                                      " entries, D has " +
                                                      std::to_string(sys.D.cols()) + " columns");
    }
    Matrix Acl = sys.A;
    Acl.diagonal() += sys.D * u;
    return Acl;
}

Vector adjoint_K(const PositiveSystem& sys, const Matrix& X) {
    if (X.rows() != sys.D.rows() || X.cols() != sys.D.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "adjoint_K expects an n x n argument");
    }
    return sys.D.transpose() * X.diagonal();
}

PositiveSystem leader_system(const Matrix& laplacian) {
    const Eigen::Index n = laplacian.rows();
    return PositiveSystem{-laplacian, Matrix::Identity(n, n), Matrix::Identity(n, n),
                          -Matrix::Identity(n, n)};
}

}  // namespace posctl
