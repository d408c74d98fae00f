#include "posctl/error.hpp"
#include "posctl/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace posctl {

double spectral_abscissa(const Matrix& A) {
    if (A.rows() != A.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "spectral_abscissa expects a square matrix");
    }
    if (A.size() == 0) return -kInf;
    if (!A.allFinite()) throw Error(ErrorCode::InvalidArgument, "non-finite matrix entry");
    Eigen::EigenSolver<Matrix> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorCode::NumericalBreakdown, "eigenvalue iteration did not converge");
    }
    return es.eigenvalues().real().maxCoeff();
}

SvdTriplet principal_svd(const Matrix& M) {
    if (!M.allFinite()) throw Error(ErrorCode::InvalidArgument, "principal_svd: non-finite entry");
    const Eigen::Index rows = M.rows();
    const Eigen::Index cols = M.cols();
    SvdTriplet out;
    out.left = Vector::Zero(rows);
    out.right = Vector::Zero(cols);
    if (rows == 0 || cols == 0) return out;

    if (M.cwiseAbs().maxCoeff() == 0.0) {
        out.left(0) = 1.0;
        out.right(0) = 1.0;
        return out;
    }

    // Symmetric eigensolve of the smaller Gram matrix, then a few rounds of
    // alternating power iteration to recover the accuracy lost by squaring.
    Vector v;
    Vector w;
    if (cols <= rows) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(M.transpose() * M);
        v = es.eigenvectors().col(cols - 1);
        w = M * v;
        w.normalize();
    } else {
        Eigen::SelfAdjointEigenSolver<Matrix> es(M * M.transpose());
        w = es.eigenvectors().col(rows - 1);
        v = M.transpose() * w;
        v.normalize();
    }

    double sigma = w.dot(M * v);
    for (int it = 0; it < 50; ++it) {
        Vector w_next = M * v;
        const double nw = w_next.norm();
        if (nw == 0.0) break;
        w_next /= nw;
        Vector v_next = M.transpose() * w_next;
        const double nv = v_next.norm();
        if (nv == 0.0) break;
        v_next /= nv;
        const double change = (v_next - v).norm() + (w_next - w).norm();
        v = std::move(v_next);
        w = std::move(w_next);
        sigma = nv;
        if (change < 1e-15) break;
    }

    Eigen::Index imax = 0;
    w.cwiseAbs().maxCoeff(&imax);
    if (w(imax) < 0.0) {
        w = -w;
        v = -v;
    }
    out.sigma = std::max(sigma, 0.0);
    out.left = std::move(w);
    out.right = std::move(v);
    return out;
}

}  // namespace posctl
