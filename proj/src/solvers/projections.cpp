#include "posctl/error.hpp"
#include "posctl/kernels.hpp"
#include "posctl/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace posctl {

namespace {

// Solution set [lo, hi] of  sum_i clamp(y_i - tau, 0, kappa) = target.
struct ShiftInterval {
    double lo = -kInf;
    double hi = kInf;
    double pick() const {
        if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
        if (std::isfinite(lo)) return lo;
        if (std::isfinite(hi)) return hi;
        return 0.0;
    }
};

double shift_sum(const std::vector<double>& y, double tau, double kappa) {
    return kernels::clamped_shift_sum(y, tau, 0.0, kappa);
}

// Requires 0 <= target <= |y| kappa (up to rounding) and nonempty y.
ShiftInterval solve_shift(const std::vector<double>& y, double kappa, double target) {
    const double full = kappa * static_cast<double>(y.size());
    const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end());
    const double eps = 1e-14 * (1.0 + full);
    if (target >= full - eps) return {-kInf, *ymin - kappa};
    if (target <= eps) return {*ymax, kInf};

    std::vector<double> bp;
    bp.reserve(2 * y.size());
    for (double v : y) {
        bp.push_back(v - kappa);
        bp.push_back(v);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<double> hv(bp.size());
    for (std::size_t k = 0; k < bp.size(); ++k) hv[k] = shift_sum(y, bp[k], kappa);

    // h is non-increasing along the sorted breakpoints, h(front) = full and
    // h(back) = 0, and it is linear in between.
    const auto first_le = static_cast<std::size_t>(
        std::partition_point(hv.begin(), hv.end(), [&](double h) { return h > target; }) - hv.begin());
    const auto last_ge = static_cast<std::size_t>(
        std::partition_point(hv.begin(), hv.end(), [&](double h) { return h >= target; }) - hv.begin()) - 1;

    ShiftInterval out;
    {
        const std::size_t k = first_le;  // >= 1
        out.lo = bp[k - 1] + (hv[k - 1] - target) / (hv[k - 1] - hv[k]) * (bp[k] - bp[k - 1]);
    }
    {
        const std::size_t k = last_ge;  // <= size - 2
        out.hi = bp[k] + (hv[k] - target) / (hv[k] - hv[k + 1]) * (bp[k + 1] - bp[k]);
    }
    if (out.hi < out.lo) out.hi = out.lo;
    return out;
}

std::vector<double> gather(const Vector& y, const std::vector<int>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(y(i));
    return out;
}

void validate_floors(Eigen::Index n, int N, double kappa, const std::vector<std::vector<int>>& subsets) {
    if (N < 1 || N > n) throw Error(ErrorCode::InvalidArgument, "capped simplex needs 1 <= N <= n");
    if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
    if (static_cast<int>(subsets.size()) > N) {
        throw Error(ErrorCode::Infeasible, "more floor subsets than leaders");
    }
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    for (const auto& s : subsets) {
        if (s.empty()) throw Error(ErrorCode::InvalidArgument, "empty floor subset");
        for (int i : s) {
            if (i < 0 || i >= n) throw Error(ErrorCode::InvalidArgument, "floor subset index out of range");
            if (seen[static_cast<std::size_t>(i)]++) {
                throw Error(ErrorCode::InvalidArgument, "floor subsets must be disjoint");
            }
        }
    }
}

double subset_sum(const Vector& u, const std::vector<int>& s) {
    double t = 0.0;
    for (int i : s) t += u(i);
    return t;
}

// Exact projection assuming the floors in `active` hold with equality and
// the rest are slack. Returns false if the KKT conditions fail.
bool solve_active_floors(const Vector& y, int N, double kappa,
                         const std::vector<std::vector<int>>& subsets,
                         const std::vector<char>& active, Vector& u) {
    const Eigen::Index n = y.size();
    std::vector<char> in_active(static_cast<std::size_t>(n), 0);
    int n_active = 0;
    for (std::size_t j = 0; j < subsets.size(); ++j) {
        if (!active[j]) continue;
        ++n_active;
        for (int i : subsets[j]) in_active[static_cast<std::size_t>(i)] = 1;
    }
    std::vector<int> rest;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!in_active[static_cast<std::size_t>(i)]) rest.push_back(static_cast<int>(i));
    }
    const double target = kappa * static_cast<double>(N - n_active);
    const double tol = 1e-12 * (1.0 + kappa * N);
    if (target < -tol || target > kappa * static_cast<double>(rest.size()) + tol) return false;

    ShiftInterval tau;
    if (!rest.empty()) tau = solve_shift(gather(y, rest), kappa, target);
    else if (std::fabs(target) > tol) return false;

    // Each active subset has shift s_j = tau - nu_j with nu_j >= 0.
    std::vector<ShiftInterval> shifts(subsets.size());
    double tau_pick = tau.lo;
    for (std::size_t j = 0; j < subsets.size(); ++j) {
        if (!active[j]) continue;
        shifts[j] = solve_shift(gather(y, subsets[j]), kappa, kappa);
        if (shifts[j].lo > tau.hi) return false;
        tau_pick = std::max(tau_pick, shifts[j].lo);
    }
    if (!std::isfinite(tau_pick)) tau_pick = tau.pick();
    tau_pick = std::min(tau_pick, tau.hi);

    u = Vector::Zero(n);
    for (int i : rest) u(i) = std::clamp(y(i) - tau_pick, 0.0, kappa);
    for (std::size_t j = 0; j < subsets.size(); ++j) {
        if (!active[j]) continue;
        const double s = std::min(shifts[j].pick(), tau_pick);
        for (int i : subsets[j]) u(i) = std::clamp(y(i) - s, 0.0, kappa);
    }
    for (std::size_t j = 0; j < subsets.size(); ++j) {
        if (!active[j] && subset_sum(u, subsets[j]) < kappa - 1e-10 * (1.0 + kappa)) return false;
    }
    return true;
}

Vector project_floor_halfspaces(Vector z, double kappa, const std::vector<std::vector<int>>& subsets) {
    // The halfspaces act on disjoint coordinates, so the projection onto their
    // intersection is separable.
    for (const auto& s : subsets) {
        const double deficit = kappa - subset_sum(z, s);
        if (deficit > 0.0) {
            const double shift = deficit / static_cast<double>(s.size());
            for (int i : s) z(i) += shift;
        }
    }
    return z;
}

}  // namespace

Vector project_simplex(const Vector& y, double total) {
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "simplex total must be positive");
    if (y.size() == 0) throw Error(ErrorCode::DimensionMismatch, "empty vector");
    std::vector<double> s(y.data(), y.data() + y.size());
    std::sort(s.begin(), s.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        cumulative += s[k];
        const double candidate = (cumulative - total) / static_cast<double>(k + 1);
        if (s[k] - candidate > 0.0) theta = candidate;
    }
    return (y.array() - theta).cwiseMax(0.0).matrix();
}

Vector project_capped_simplex(const Vector& y, int N, double kappa) {
    const Eigen::Index n = y.size();
    validate_floors(n, N, kappa, {});
    if (N == n) return Vector::Constant(n, kappa);
    const std::vector<double> ys(y.data(), y.data() + n);
    const double tau = solve_shift(ys, kappa, kappa * N).pick();
    return (y.array() - tau).cwiseMax(0.0).cwiseMin(kappa).matrix();
}

Vector project_with_subset_floors(const Vector& y, int N, double kappa,
                                  const std::vector<std::vector<int>>& subsets) {
    const Eigen::Index n = y.size();
    validate_floors(n, N, kappa, subsets);
    if (subsets.empty()) return project_capped_simplex(y, N, kappa);

    // Dykstra between the capped simplex and the floor halfspaces.
    Vector x = y;
    Vector p = Vector::Zero(n);
    Vector q = Vector::Zero(n);
    bool settled = false;
    const double scale = 1.0 + y.norm();
    for (int sweep = 0; sweep < 100000; ++sweep) {
        const Vector z = project_capped_simplex(x + p, N, kappa);
        p = x + p - z;
        const Vector x_next = project_floor_halfspaces(z + q, kappa, subsets);
        q = z + q - x_next;
        const double change = (x_next - x).norm();
        x = x_next;
        if (change <= 1e-13 * scale && (x - z).norm() <= 1e-10 * scale) {
            settled = true;
            break;
        }
    }

    // Exact polish: guess the active floors from the Dykstra iterate, then
    // fall back to enumerating floor patterns when the guess fails KKT.
    const std::size_t k = subsets.size();
    std::vector<char> active(k, 0);
    for (std::size_t j = 0; j < k; ++j) active[j] = subset_sum(x, subsets[j]) <= kappa + 1e-7 * (1.0 + kappa);
    Vector u;
    if (solve_active_floors(y, N, kappa, subsets, active, u)) return u;
    if (k <= 12) {
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            for (std::size_t j = 0; j < k; ++j) active[j] = (mask >> j) & 1u;
            if (solve_active_floors(y, N, kappa, subsets, active, u)) return u;
        }
    }
    if (!settled) {
        throw Error(ErrorCode::MaxAlternations, "Dykstra projection did not converge in 1e5 sweeps");
    }
    return x;
}

Vector prox_l1(const Vector& y, double t, const Vector& w) {
    if (w.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "prox_l1: weight length");
    Vector out(y.size());
    kernels::active().soft_threshold(y.data(), w.data(), t, out.data(), static_cast<std::size_t>(y.size()));
    return out;
}

Vector prox_l1_nonneg(const Vector& y, double t, const Vector& w) {
    if (w.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "prox_l1: weight length");
    Vector out(y.size());
    kernels::active().soft_threshold_nonneg(y.data(), w.data(), t, out.data(),
                                            static_cast<std::size_t>(y.size()));
    return out;
}

// ------------------------------------------------------------- ConstraintSet

ConstraintSet ConstraintSet::simplex(double total) {
    ConstraintSet c;
    c.kind = Kind::Simplex;
    c.total = total;
    return c;
}

ConstraintSet ConstraintSet::capped(int N, double kappa) {
    ConstraintSet c;
    c.kind = Kind::CappedSimplex;
    c.N = N;
    c.kappa = kappa;
    return c;
}

ConstraintSet ConstraintSet::capped_with_floors(int N, double kappa, std::vector<std::vector<int>> subsets) {
    ConstraintSet c;
    c.kind = Kind::CappedWithFloors;
    c.N = N;
    c.kappa = kappa;
    c.subsets = std::move(subsets);
    return c;
}

ConstraintSet ConstraintSet::box(Vector lo, Vector hi) {
    ConstraintSet c;
    c.kind = Kind::Box;
    c.lo = std::move(lo);
    c.hi = std::move(hi);
    return c;
}

void ConstraintSet::check(Eigen::Index n) const {
    switch (kind) {
    case Kind::Nonneg: return;
    case Kind::Simplex:
        if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "simplex total must be positive");
        return;
    case Kind::CappedSimplex: validate_floors(n, N, kappa, {}); return;
    case Kind::CappedWithFloors: validate_floors(n, N, kappa, subsets); return;
    case Kind::Box:
        if (lo.size() != n || hi.size() != n) throw Error(ErrorCode::DimensionMismatch, "box bounds length");
        if ((lo.array() > hi.array()).any()) throw Error(ErrorCode::InvalidArgument, "box lo > hi");
        return;
    }
}

Vector ConstraintSet::project(const Vector& y) const {
    switch (kind) {
    case Kind::Nonneg: return y.cwiseMax(0.0);
    case Kind::Simplex: return project_simplex(y, total);
    case Kind::CappedSimplex: return project_capped_simplex(y, N, kappa);
    case Kind::CappedWithFloors: return project_with_subset_floors(y, N, kappa, subsets);
    case Kind::Box: return y.cwiseMax(lo).cwiseMin(hi);
    }
    return y;
}

bool ConstraintSet::contains(const Vector& u, double tol) const {
    switch (kind) {
    case Kind::Nonneg: return u.size() == 0 || u.minCoeff() >= -tol;
    case Kind::Simplex:
        return u.minCoeff() >= -tol && std::fabs(u.sum() - total) <= tol * (1.0 + total);
    case Kind::CappedSimplex:
    case Kind::CappedWithFloors: {
        const double target = kappa * N;
        if (u.minCoeff() < -tol || u.maxCoeff() > kappa + tol) return false;
        if (std::fabs(u.sum() - target) > tol * (1.0 + target)) return false;
        for (const auto& s : subsets) {
            if (subset_sum(u, s) < kappa - tol) return false;
        }
        return true;
    }
    case Kind::Box:
        return ((u - lo).array() >= -tol).all() && ((hi - u).array() >= -tol).all();
    }
    return false;
}

// --------------------------------------------------------------- Regularizer

Regularizer Regularizer::constraint(ConstraintSet set) {
    Regularizer r;
    r.kind_ = Kind::Constraint;
    r.set_ = std::move(set);
    return r;
}

Regularizer Regularizer::weighted_l1(double gamma, Vector weights, bool nonneg) {
    if (gamma < 0.0 || (weights.size() > 0 && weights.minCoeff() < 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "l1 weights and gamma must be nonnegative");
    }
    Regularizer r;
    r.kind_ = Kind::WeightedL1;
    r.gamma_ = gamma;
    r.weights_ = std::move(weights);
    r.nonneg_ = nonneg;
    return r;
}

double Regularizer::value(const Vector& u) const {
    switch (kind_) {
    case Kind::None: return 0.0;
    case Kind::Constraint: return set_.contains(u) ? 0.0 : kInf;
    case Kind::WeightedL1:
        if (nonneg_ && u.size() > 0 && u.minCoeff() < -1e-12) return kInf;
        return gamma_ * weights_.dot(u.cwiseAbs());
    }
    return 0.0;
}

Vector Regularizer::prox(const Vector& y, double t) const {
    switch (kind_) {
    case Kind::None: return y;
    case Kind::Constraint: return set_.project(y);
    case Kind::WeightedL1:
        return nonneg_ ? prox_l1_nonneg(y, t * gamma_, weights_) : prox_l1(y, t * gamma_, weights_);
    }
    return y;
}

double Regularizer::envelope(const Vector& x, double mu) const {
    const Vector p = prox(x, mu);
    const double gp = kind_ == Kind::Constraint ? 0.0 : value(p);
    return gp + (x - p).squaredNorm() / (2.0 * mu);
}

Vector Regularizer::envelope_gradient(const Vector& x, double mu) const {
    return (x - prox(x, mu)) / mu;
}

}  // namespace posctl
