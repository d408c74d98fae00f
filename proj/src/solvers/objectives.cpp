#include "posctl/error.hpp"
#include "posctl/solvers.hpp"

namespace posctl {

std::vector<BlockGradient> J2Objective::blocks(const Vector& u) const {
    BlockGradient b;
    b.block = 0;
    b.value = j2(sys_, u);
    b.gradient = grad_j2(sys_, u);
    return {std::move(b)};
}

JinfObjective::JinfObjective(PositiveSystem sys)
    : sys_(std::move(sys)), structure_(block_structure(sys_)) {}

std::vector<BlockGradient> JinfObjective::blocks(const Vector& u) const {
    return jinf_block_gradients(sys_, structure_, u);
}

std::string_view to_string(Metric metric) {
    return metric == Metric::H2 ? "h2" : "hinf";
}

Metric parse_metric(std::string_view text) {
    if (text == "h2") return Metric::H2;
    if (text == "hinf") return Metric::Hinf;
    throw Error(ErrorCode::InvalidArgument, "metric must be h2 or hinf, got '" + std::string(text) + "'");
}

std::shared_ptr<const Objective> make_objective(const PositiveSystem& sys, Metric metric) {
    if (metric == Metric::H2) return std::make_shared<J2Objective>(sys);
    return std::make_shared<JinfObjective>(sys);
}

SmoothTerm quadratic_term(const Matrix& R) {
    if (R.rows() != R.cols()) throw Error(ErrorCode::DimensionMismatch, "R must be square");
    const Matrix S = R + R.transpose();
    return SmoothTerm{[R](const Vector& u) { return u.dot(R * u); },
                      [S](const Vector& u) -> Vector { return S * u; }};
}

double Problem::smooth_value(const Vector& u) const {
    const double J = objective->value(u);
    if (!std::isfinite(J)) return kInf;
    return smooth.empty() ? J : J + smooth.value(u);
}

Vector Problem::smooth_gradient(const Vector& u) const {
    return smooth.empty() ? Vector::Zero(u.size()) : smooth.gradient(u);
}

double Problem::value(const Vector& u) const {
    const double f = smooth_value(u);
    if (!std::isfinite(f)) return kInf;
    return f + reg.value(u);
}

std::string_view to_string(Termination t) {
    switch (t) {
    case Termination::Stationary: return "stationary";
    case Termination::MaxIter: return "max_iter";
    case Termination::Diverged: return "diverged";
    case Termination::Infeasible: return "infeasible";
    case Termination::NoProgress: return "no_progress";
    }
    return "unknown";
}

}  // namespace posctl
