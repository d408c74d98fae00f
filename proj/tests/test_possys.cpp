#include "support/oracles.hpp"

#include "posctl/possys.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace posctl;

namespace {

PositiveSystem two_state(double a12) {
    PositiveSystem s;
    s.A.resize(2, 2);
    s.A << -1, a12, 0, -1;
    s.B = Matrix::Identity(2, 2);
    s.C = Matrix::Identity(2, 2);
    s.D = -Matrix::Identity(2, 2);
    return s;
}

}  // namespace

TEST(Validate, AcceptsMetzlerSystem) { EXPECT_TRUE(validate(two_state(2.0)).empty()); }

TEST(Validate, ReportsNegativeOffDiagonal) {
    const auto v = validate(two_state(-0.5));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].matrix, "A");
    EXPECT_EQ(v[0].row, 0);
    EXPECT_EQ(v[0].col, 1);
    EXPECT_DOUBLE_EQ(v[0].value, -0.5);
}

TEST(Validate, ToleratesRoundoffBelowZero) { EXPECT_TRUE(validate(two_state(-1e-13)).empty()); }

TEST(Validate, FlagsNegativeBCAndDimensions) {
    PositiveSystem s = two_state(1.0);
    s.B(1, 0) = -0.1;
    s.C(0, 1) = -2.0;
    EXPECT_EQ(validate(s).size(), 2u);

    PositiveSystem bad = two_state(1.0);
    bad.D = Matrix::Ones(3, 1);
    const auto v = validate(bad);
    ASSERT_FALSE(v.empty());
    EXPECT_EQ(v[0].matrix, "dims");
}

TEST(Validate, DoseMatrixMayHaveAnySign) { EXPECT_TRUE(validate(oracle::mutant_system()).empty()); }

TEST(ClosedLoop, Examples) {
    const PositiveSystem s = two_state(1.0);
    EXPECT_EQ(closed_loop(s, Vector::Zero(2)), s.A);

    const PositiveSystem leader = leader_system(oracle::four_node_network().laplacian());
    const double kappa = 2.5;
    Vector u = Vector::Zero(4);
    u(1) = kappa;
    Matrix expected = leader.A;
    expected(1, 1) -= kappa;
    EXPECT_EQ(closed_loop(leader, u), expected);

    const PositiveSystem f5 = oracle::mutant_system();
    const Matrix Acl = closed_loop(f5, Vector::Constant(2, 2.5));
    Matrix ref = Matrix::Zero(4, 4);
    ref.topLeftCorner(2, 2) << -1.5, 1, 1, -1.25;
    ref.bottomRightCorner(2, 2) << -1.25, 1, 1, -1.5;
    EXPECT_LE((Acl - ref).norm(), 1e-15);
}

TEST(AdjointK, Examples) {
    PositiveSystem s = two_state(0.0);
    s.A = -Matrix::Identity(3, 3);
    s.B = s.C = Matrix::Identity(3, 3);
    s.D = Matrix::Identity(3, 3);
    const Matrix X = Vector(Vector::LinSpaced(3, 1, 3)).asDiagonal();
    EXPECT_EQ(adjoint_K(s, X), Vector::LinSpaced(3, 1, 3));

    const Vector g = adjoint_K(oracle::mutant_system(), Matrix::Identity(4, 4));
    EXPECT_NEAR(g(0), -1.9, 1e-15);
    EXPECT_NEAR(g(1), -1.9, 1e-15);
}

TEST(AdjointK, InnerProductIdentity) {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const PositiveSystem s = oracle::random_positive_system(6, 3, rng);
        const Matrix X = Matrix::Random(6, 6);
        const Vector u = Vector::Random(3);
        const Matrix Ku = Matrix((s.D * u).asDiagonal());
        EXPECT_NEAR((X.transpose() * Ku).trace(), adjoint_K(s, X).dot(u), 1e-12);
    }
}

TEST(LeaderSystem, Shape) {
    const Matrix L = oracle::four_node_network().laplacian();
    const PositiveSystem s = leader_system(L);
    EXPECT_EQ(s.A, -L);
    EXPECT_EQ(s.B, Matrix::Identity(4, 4));
    EXPECT_EQ(s.C, Matrix::Identity(4, 4));
    EXPECT_EQ(s.D, -Matrix::Identity(4, 4));
    EXPECT_TRUE(validate(s).empty());
}
