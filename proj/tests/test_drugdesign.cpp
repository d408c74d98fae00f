#include "support/oracles.hpp"

#include "posctl/drugdesign.hpp"
#include "posctl/error.hpp"
#include "posctl/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace posctl;

namespace {

double value(const TherapyProblem& p, const Vector& u) {
    const double J = p.metric == Metric::H2 ? j2(p.sys, u) : jinf(p.sys, u);
    return p.R.size() == 0 ? J : J + u.dot(p.R * u);
}

// Two coupled unstable pairs; each drug alone can stabilize both, the first
// more strongly.
PositiveSystem two_pair_system(int drugs = 2) {
    PositiveSystem sys;
    sys.A = Matrix::Zero(4, 4);
    sys.A.topLeftCorner(2, 2) << -0.5, 1, 1, -0.5;
    sys.A.bottomRightCorner(2, 2) << -0.5, 1, 1, -0.5;
    sys.A(2, 1) = 0.2;
    sys.B = Matrix::Identity(4, 4);
    sys.C = Matrix::Identity(4, 4);
    sys.D.resize(4, drugs);
    sys.D.col(0) << -1, -1, -0.8, -0.8;
    sys.D.col(1) << -0.4, -0.3, -0.5, -0.4;
    if (drugs > 2) sys.D.col(2) << -0.1, 0, -0.2, 0;
    return sys;
}

TherapyProblem with_r(PositiveSystem sys, Metric metric, double r = 1.0) {
    const Eigen::Index m = sys.D.cols();
    return {std::move(sys), metric, r * Matrix::Identity(m, m)};
}

// Minimizes a convex scalar function on [lo, hi] by a coarse grid followed by
// ternary refinement around the best grid point.
double scalar_min(const std::function<double(double)>& f, double lo, double hi) {
    const int K = 2000;
    int best = 0;
    double fb = kInf;
    for (int k = 0; k <= K; ++k) {
        const double v = f(lo + (hi - lo) * k / K);
        if (v < fb) {
            fb = v;
            best = k;
        }
    }
    double a = lo + (hi - lo) * std::max(best - 1, 0) / K;
    double b = lo + (hi - lo) * std::min(best + 1, K) / K;
    for (int it = 0; it < 200; ++it) {
        const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
        (f(m1) < f(m2) ? b : a) = f(m1) < f(m2) ? m2 : m1;
    }
    return f(0.5 * (a + b));
}

}  // namespace

TEST(Budget, SingleDrugIsForced) {
    PositiveSystem sys = leader_system(Matrix::Zero(1, 1));
    TherapyProblem p{sys, Metric::H2, {}};
    const SolveReport r = budget_design(p, 3.0);
    EXPECT_NEAR(r.u(0), 3.0, 1e-12);
    EXPECT_NEAR(value(p, r.u), j2(sys, Vector::Constant(1, 3.0)), 1e-12);
}

TEST(Budget, MutantBeatsEvenSplit) {
    TherapyProblem p{oracle::mutant_system(), Metric::Hinf, {}};
    const SolveReport r = budget_design(p, 6.0);
    EXPECT_LE(value(p, r.u), value(p, Vector::Constant(2, 3.0)) + 1e-12);
    EXPECT_NEAR(r.u.sum(), 6.0, 1e-10);
    EXPECT_GE(r.u.minCoeff(), 0.0);
}

TEST(Budget, StaysOnTheSimplex) {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        TherapyProblem p{oracle::random_positive_system(5, 3, rng), trial % 2 ? Metric::Hinf : Metric::H2, {}};
        const double b = 0.5 + trial;
        const SolveReport r = budget_design(p, b);
        EXPECT_NEAR(r.u.sum(), b, 1e-10);
        EXPECT_GE(r.u.minCoeff(), 0.0);
        EXPECT_LE(value(p, r.u), value(p, Vector::Constant(3, b / 3)) + 1e-12);
    }
}

TEST(Budget, IdenticalColumnsMatchSymmetricSplit) {
    PositiveSystem sys = two_pair_system();
    sys.D.col(1) = sys.D.col(0);
    TherapyProblem p{sys, Metric::H2, {}};
    const SolveReport r = budget_design(p, 4.0);
    EXPECT_NEAR(value(p, r.u), value(p, Vector::Constant(2, 2.0)), 1e-6);
}

TEST(Polish, FullSupportIsTheDenseOptimum) {
    const TherapyProblem p = with_r(two_pair_system(3), Metric::H2);
    const PolishResult full = polish(p, {0, 1, 2});
    const Vector g = grad_j2(p.sys, full.u) + 2.0 * p.R * full.u;
    for (int i = 0; i < 3; ++i) {
        if (full.u(i) > 1e-8) EXPECT_NEAR(g(i), 0.0, 1e-5) << i;
        else EXPECT_GE(g(i), -1e-5) << i;
    }
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(0.0, 3.0);
    for (int k = 0; k < 50; ++k) {
        const Vector u = Vector::NullaryExpr(3, [&] { return U(rng); });
        EXPECT_LE(full.objective, value(p, u) + 1e-9);
    }
}

TEST(Polish, SingleDrugMatchesGridSearch) {
    for (Metric metric : {Metric::H2, Metric::Hinf}) {
        const TherapyProblem p = with_r(two_pair_system(), metric);
        for (int drug : {0, 1}) {
            const PolishResult r = polish(p, {drug});
            const double ref = scalar_min(
                [&](double c) { return value(p, c * Vector::Unit(2, drug)); }, 0.0, 2.0 * r.u(drug) + 5.0);
            EXPECT_NEAR(r.objective, ref, 1e-6 * (1.0 + ref)) << to_string(metric) << " drug " << drug;
            EXPECT_EQ(r.u(1 - drug), 0.0);
        }
    }
}

TEST(Polish, MutantSingleDrugIsInfeasible) {
    // Each drug leaves one mutant's growth rate untouched, and a Metzler matrix
    // with a positive diagonal entry is never Hurwitz.
    const TherapyProblem p = with_r(oracle::mutant_system(), Metric::H2);
    for (int drug : {0, 1}) {
        try {
            polish(p, {drug});
            FAIL() << "expected Infeasible";
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::Infeasible);
        }
    }
}

TEST(Polish, EmptySupportOnUnstableSystem) {
    const TherapyProblem p = with_r(oracle::mutant_system(), Metric::H2);
    EXPECT_THROW(polish(p, {}), Error);
}

TEST(Polish, ExactZerosOffSupport) {
    const TherapyProblem p = with_r(two_pair_system(3), Metric::Hinf);
    const PolishResult r = polish(p, {0, 2});
    EXPECT_EQ(r.u(1), 0.0);
    EXPECT_EQ(r.support, (std::vector<int>{0, 2}));
}

TEST(Homotopy, SmallGammaKeepsEveryDrug) {
    const TherapyProblem p = with_r(two_pair_system(3), Metric::H2);
    try {
        sparsity_homotopy(p, 1, {1e-6});
        FAIL() << "expected HomotopyError";
    } catch (const HomotopyError& e) {
        EXPECT_EQ(e.code(), ErrorCode::TargetUnreachable);
        ASSERT_EQ(e.path().points.size(), 1u);
        EXPECT_EQ(e.path().points[0].cardinality, 3);
        EXPECT_FALSE(e.path().reached);
    }
}

TEST(Homotopy, ReachesOneDrugWithTheBetterSingleton) {
    for (Metric metric : {Metric::H2, Metric::Hinf}) {
        const TherapyProblem p = with_r(two_pair_system(), metric);
        const HomotopyPath path = sparsity_homotopy(p, 1);
        ASSERT_TRUE(path.reached);
        const PolishResult& last = path.polished.back();
        ASSERT_EQ(last.support.size(), 1u);
        const double other = polish(p, {1 - last.support[0]}).objective;
        EXPECT_LE(last.objective, other) << to_string(metric);
    }
}

TEST(Homotopy, MutantStopsAtTwoDrugs) {
    const TherapyProblem p = with_r(oracle::mutant_system(), Metric::H2);
    try {
        sparsity_homotopy(p, 1);
        FAIL() << "expected HomotopyError";
    } catch (const HomotopyError& e) {
        for (const auto& pt : e.path().points) EXPECT_EQ(pt.cardinality, 2);
    }
}

TEST(Homotopy, CardinalityNeverIncreases) {
    std::mt19937 rng(77);
    std::vector<double> grid;
    for (int k = 0; k < 20; ++k) grid.push_back(0.01 * std::pow(1000.0, k / 19.0));
    for (int trial = 0; trial < 20; ++trial) {
        const TherapyProblem p = with_r(oracle::random_positive_system(4, 4, rng), Metric::H2, 0.1);
        HomotopyPath path;
        try {
            path = sparsity_homotopy(p, 0, grid);
        } catch (const HomotopyError& e) {
            path = e.path();
        }
        for (std::size_t k = 1; k < path.points.size(); ++k) {
            EXPECT_LE(path.points[k].cardinality, path.points[k - 1].cardinality) << trial;
            EXPECT_GT(path.points[k].gamma, path.points[k - 1].gamma);
        }
        for (const auto& pr : path.polished) {
            for (int i = 0; i < 4; ++i) {
                if (std::find(pr.support.begin(), pr.support.end(), i) == pr.support.end()) EXPECT_EQ(pr.u(i), 0.0);
            }
        }
    }
}

TEST(Homotopy, DefaultGrid) {
    const auto g = default_gamma_grid();
    ASSERT_EQ(g.size(), 50u);
    EXPECT_DOUBLE_EQ(g.front(), 0.01);
    EXPECT_NEAR(g.back(), 10.0, 1e-12);
    EXPECT_NEAR(g[1] / g[0], g[49] / g[48], 1e-12);
}

TEST(Degradation, FullIsZeroAndColumnIsMonotone) {
    for (Metric metric : {Metric::H2, Metric::Hinf}) {
        const TherapyProblem p = with_r(two_pair_system(3), metric);
        const HomotopyPath path = sparsity_homotopy(p, 1);
        const auto rows = degradation_report(path);
        ASSERT_FALSE(rows.empty());
        EXPECT_EQ(rows.back().N, 3);
        EXPECT_NEAR(rows.back().percent, 0.0, 1e-12);
        for (std::size_t k = 1; k < rows.size(); ++k) {
            EXPECT_LT(rows[k - 1].N, rows[k].N);
            EXPECT_GE(rows[k - 1].percent, rows[k].percent - 1e-9);
        }
    }
}

TEST(Degradation, OneDrugCostsMoreThanTwo) {
    const TherapyProblem p = with_r(two_pair_system(), Metric::H2);
    const double dense = polish(p, {0, 1}).objective;
    const double single = std::min(polish(p, {0}).objective, polish(p, {1}).objective);
    EXPECT_GE(100.0 * (single / dense - 1.0), 0.0);

    const auto rows = degradation_report(sparsity_homotopy(p, 1));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_GE(rows[0].percent, rows[1].percent);
}
