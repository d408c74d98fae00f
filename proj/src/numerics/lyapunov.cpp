#include "posctl/error.hpp"
#include "posctl/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <complex>

namespace posctl {

Matrix solve_lyapunov(const Matrix& A, const Matrix& Q) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || Q.rows() != n || Q.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "solve_lyapunov expects square A and Q of equal size");
    }
    if (n == 0) return Matrix(0, 0);

    using Complex = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;

    Eigen::ComplexSchur<Matrix> schur(A);
    if (schur.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalBreakdown, "Schur decomposition did not converge");
    }
    const CMatrix& T = schur.matrixT();
    const CMatrix& U = schur.matrixU();

    double abscissa = -kInf;
    for (Eigen::Index i = 0; i < n; ++i) abscissa = std::max(abscissa, T(i, i).real());
    if (!(abscissa < kHurwitzMargin)) {
        throw Error(ErrorCode::NonHurwitz, "spectral abscissa " + std::to_string(abscissa));
    }

    // With A = U T U^H and Y = U^H X U:  T Y + Y T^H = -U^H Q U.
    // T^H is lower triangular, so column j of Y only couples to columns k > j.
    CMatrix C = -(U.adjoint() * Q.cast<Complex>() * U);
    CMatrix Y = CMatrix::Zero(n, n);
    for (Eigen::Index j = n - 1; j >= 0; --j) {
        Eigen::VectorXcd rhs = C.col(j);
        for (Eigen::Index k = j + 1; k < n; ++k) rhs -= std::conj(T(j, k)) * Y.col(k);
        CMatrix shifted = T;
        shifted.diagonal().array() += std::conj(T(j, j));
        Y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
    }

    Matrix X = (U * Y * U.adjoint()).real();
    if ((Q - Q.transpose()).cwiseAbs().maxCoeff() == 0.0) X = 0.5 * (X + X.transpose());
    return X;
}

}  // namespace posctl
