#include "posctl/metrics.hpp"

#include "posctl/error.hpp"
#include "posctl/kernels.hpp"
#include "posctl/netgraph.hpp"
#include "posctl/numerics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <set>

namespace posctl {

namespace {

Matrix checked_closed_loop(const PositiveSystem& sys, const ControlVector& u) {
    Matrix Acl = closed_loop(sys, u);
    if (!is_hurwitz(Acl)) throw Error(ErrorCode::NonHurwitz, "closed loop is not Hurwitz");
    return Acl;
}

Matrix select(const Matrix& M, const std::vector<int>& rows, const std::vector<int>& cols) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = M(rows[i], cols[j]);
        }
    }
    return out;
}

std::vector<int> iota_vec(Eigen::Index n) {
    std::vector<int> v(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    return v;
}

// Columns f_j + grad g of the bundle.
Matrix shifted_gradients(const SubgradientBundle& bundle, const Vector& grad_g) {
    if (bundle.blocks.empty()) throw Error(ErrorCode::InvalidArgument, "empty subgradient bundle");
    const Eigen::Index m = grad_g.size();
    Matrix G(m, static_cast<Eigen::Index>(bundle.blocks.size()));
    for (std::size_t j = 0; j < bundle.blocks.size(); ++j) {
        if (bundle.blocks[j].gradient.size() != m) {
            throw Error(ErrorCode::DimensionMismatch, "bundle gradient length differs from grad g");
        }
        G.col(static_cast<Eigen::Index>(j)) = bundle.blocks[j].gradient + grad_g;
    }
    return G;
}

}  // namespace

GramianPair gramians(const PositiveSystem& sys, const ControlVector& u) {
    const Matrix Acl = checked_closed_loop(sys, u);
    GramianPair g;
    g.Xc = solve_lyapunov(Acl, sys.B * sys.B.transpose());
    g.Xo = solve_lyapunov(Acl.transpose(), sys.C.transpose() * sys.C);
    return g;
}

double j2(const PositiveSystem& sys, const ControlVector& u) {
    const Matrix Acl = closed_loop(sys, u);
    if (!is_hurwitz(Acl)) return kInf;
    const Matrix Xc = solve_lyapunov(Acl, sys.B * sys.B.transpose());
    const Matrix CtC = sys.C.transpose() * sys.C;
    return kernels::dot({CtC.data(), static_cast<std::size_t>(CtC.size())},
                        {Xc.data(), static_cast<std::size_t>(Xc.size())});
}

Vector grad_j2(const PositiveSystem& sys, const ControlVector& u) {
    const GramianPair g = gramians(sys, u);
    const Eigen::Index n = sys.states();
    // diag(Xc Xo)_i = <row i of Xc, column i of Xo>; Xc is symmetric.
    Vector d(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        d(i) = kernels::dot({g.Xc.col(i).data(), static_cast<std::size_t>(n)},
                            {g.Xo.col(i).data(), static_cast<std::size_t>(n)});
    }
    return 2.0 * (sys.D.transpose() * d);
}

double jinf(const PositiveSystem& sys, const ControlVector& u) {
    const Matrix Acl = closed_loop(sys, u);
    if (!is_hurwitz(Acl)) return kInf;
    const Matrix X = Eigen::PartialPivLU<Matrix>(Acl).solve(sys.B);
    return principal_svd(-(sys.C * X)).sigma;
}

BlockStructure block_structure(const PositiveSystem& sys) {
    const Partition comps = weak_components(sys.A);
    std::vector<int> comp_of(static_cast<std::size_t>(sys.states()), -1);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        for (int s : comps[c]) comp_of[static_cast<std::size_t>(s)] = static_cast<int>(c);
    }
    BlockStructure out;
    out.blocks.resize(comps.size());
    for (std::size_t c = 0; c < comps.size(); ++c) out.blocks[c].states = comps[c];

    auto owner = [&](auto entry, Eigen::Index count, const char* what, Eigen::Index idx) {
        std::set<int> touched;
        for (Eigen::Index r = 0; r < count; ++r) {
            if (entry(r) != 0.0) touched.insert(comp_of[static_cast<std::size_t>(r)]);
        }
        if (touched.size() > 1) {
            throw Error(ErrorCode::AssumptionViolation,
                        std::string(what) + " " + std::to_string(idx + 1) +
                            " couples distinct components of G(A)");
        }
        return touched.empty() ? -1 : *touched.begin();
    };
    for (Eigen::Index c = 0; c < sys.B.cols(); ++c) {
        const int k = owner([&](Eigen::Index r) { return sys.B(r, c); }, sys.B.rows(), "B column", c);
        if (k >= 0) out.blocks[static_cast<std::size_t>(k)].inputs.push_back(static_cast<int>(c));
    }
    for (Eigen::Index r = 0; r < sys.C.rows(); ++r) {
        const int k = owner([&](Eigen::Index s) { return sys.C(r, s); }, sys.C.cols(), "C row", r);
        if (k >= 0) out.blocks[static_cast<std::size_t>(k)].outputs.push_back(static_cast<int>(r));
    }
    return out;
}

std::vector<BlockGradient> jinf_block_gradients(const PositiveSystem& sys,
                                                const BlockStructure& structure,
                                                const ControlVector& u) {
    const Matrix Acl = closed_loop(sys, u);
    std::vector<BlockGradient> out;
    out.reserve(structure.blocks.size());
    const std::vector<int> all_controls = iota_vec(sys.controls());
    for (std::size_t b = 0; b < structure.blocks.size(); ++b) {
        const auto& blk = structure.blocks[b];
        const Matrix Ab = select(Acl, blk.states, blk.states);
        if (!is_hurwitz(Ab)) throw Error(ErrorCode::NonHurwitz, "closed-loop block is not Hurwitz");
        BlockGradient bg;
        bg.block = static_cast<int>(b);
        bg.gradient = Vector::Zero(sys.controls());
        if (!blk.inputs.empty() && !blk.outputs.empty()) {
            const Matrix Bb = select(sys.B, blk.states, blk.inputs);
            const Matrix Cb = select(sys.C, blk.outputs, blk.states);
            const Eigen::PartialPivLU<Matrix> lu(Ab);
            const SvdTriplet t = principal_svd(-(Cb * lu.solve(Bb)));
            const Vector p = lu.solve(Bb * t.right);
            const Vector q = Eigen::PartialPivLU<Matrix>(Ab.transpose()).solve(Cb.transpose() * t.left);
            const Matrix Db = select(sys.D, blk.states, all_controls);
            bg.value = t.sigma;
            bg.gradient = Db.transpose() * p.cwiseProduct(q);
        }
        out.push_back(std::move(bg));
    }
    return out;
}

SubgradientBundle make_bundle(std::vector<BlockGradient> all, double tie_tolerance) {
    if (all.empty()) throw Error(ErrorCode::InvalidArgument, "no blocks");
    SubgradientBundle bundle;
    bundle.value = -kInf;
    for (const auto& b : all) bundle.value = std::max(bundle.value, b.value);
    bundle.tie_tolerance = tie_tolerance;
    for (auto& b : all) {
        if (bundle.value - b.value <= tie_tolerance) bundle.blocks.push_back(std::move(b));
    }
    return bundle;
}

SubgradientBundle jinf_blocks(const PositiveSystem& sys, const ControlVector& u) {
    auto all = jinf_block_gradients(sys, block_structure(sys), u);
    double value = 0.0;
    for (const auto& b : all) value = std::max(value, b.value);
    return make_bundle(std::move(all), default_tie_tolerance(value));
}

DescentDirection optimal_subgradient_direction(const SubgradientBundle& bundle,
                                               const Vector& grad_g) {
    const Matrix G = shifted_gradients(bundle, grad_g);
    const Eigen::Index k = G.cols();
    DescentDirection out;

    if (k == 1) {
        out.alpha = Vector::Ones(1);
        out.v = -G.col(0);
        out.slope = -G.col(0).squaredNorm();
    } else {
        // Since sum(alpha) = 1, F alpha + grad g = G alpha and the constraints
        // read -(G^T G alpha)_j - t <= 0.
        const Matrix H = G.transpose() * G;
        LpProblem lp;
        lp.c = Vector::Zero(k + 1);
        lp.c(k) = 1.0;
        lp.A_ub.resize(k, k + 1);
        lp.A_ub.leftCols(k) = -H;
        lp.A_ub.col(k).setConstant(-1.0);
        lp.b_ub = Vector::Zero(k);
        lp.A_eq = Matrix::Zero(1, k + 1);
        lp.A_eq.leftCols(k).setOnes();
        lp.b_eq = Vector::Ones(1);
        lp.lower = Vector::Zero(k + 1);
        lp.lower(k) = -kInf;
        const LpResult r = solve_lp(lp);
        if (r.status != LpStatus::Optimal) {
            throw Error(ErrorCode::LpFailure, "descent LP ended " + std::string(to_string(r.status)));
        }
        out.alpha = r.x.head(k).cwiseMax(0.0);
        out.alpha /= out.alpha.sum();
        out.v = -(G * out.alpha);
        out.slope = (G.transpose() * out.v).maxCoeff();
    }
    // The slope is accurate to roughly eps |v| max_j |G_j|; anything clearly
    // below that noise level is a genuine descent direction.
    const double noise = 1e-13 * out.v.norm() * G.colwise().norm().maxCoeff();
    out.certified_descent = out.slope < -noise && out.v.norm() > 0.0;
    return out;
}

double stationarity_check(const SubgradientBundle& bundle, const Vector& grad_g) {
    const Matrix G = shifted_gradients(bundle, grad_g);
    const Eigen::Index m = G.rows();
    const Eigen::Index k = G.cols();
    if (k == 1) return G.col(0).cwiseAbs().maxCoeff();

    // variables (alpha, s):  -s <= (G alpha)_i <= s,  sum(alpha) = 1
    LpProblem lp;
    lp.c = Vector::Zero(k + 1);
    lp.c(k) = 1.0;
    lp.A_ub = Matrix::Zero(2 * m, k + 1);
    lp.A_ub.topLeftCorner(m, k) = G;
    lp.A_ub.bottomLeftCorner(m, k) = -G;
    lp.A_ub.col(k).setConstant(-1.0);
    lp.b_ub = Vector::Zero(2 * m);
    lp.A_eq = Matrix::Zero(1, k + 1);
    lp.A_eq.leftCols(k).setOnes();
    lp.b_eq = Vector::Ones(1);
    const LpResult r = solve_lp(lp);
    if (r.status != LpStatus::Optimal) {
        throw Error(ErrorCode::LpFailure, "stationarity LP ended " + std::string(to_string(r.status)));
    }
    Vector alpha = r.x.head(k).cwiseMax(0.0);
    alpha /= alpha.sum();
    return (G * alpha).cwiseAbs().maxCoeff();
}

SymmetricPartBounds symmetric_part_bounds(const Matrix& L, const Vector& u) {
    if (L.rows() != L.cols() || u.size() != L.rows()) {
        throw Error(ErrorCode::DimensionMismatch, "symmetric_part_bounds: size mismatch");
    }
    Matrix H = 0.5 * (L + L.transpose());
    H.diagonal() += u;
    const Eigen::LLT<Matrix> llt(H);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::Singular, "symmetric part plus leader weights is not positive definite");
    }
    const Matrix Hinv = llt.solve(Matrix::Identity(H.rows(), H.cols()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (!(lmin > 1e-12 * scale)) throw Error(ErrorCode::Singular, "symmetric part is not positive definite");
    return {0.5 * Hinv.trace(), 1.0 / lmin};
}

}  // namespace posctl
