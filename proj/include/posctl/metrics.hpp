#pragma once

// H2 and H-infinity performance of the closed loop A + diag(D u), their
// gradients, the block-wise subdifferential of the H-infinity norm and the
// LPs that turn it into a descent direction or a stationarity certificate.

#include "posctl/possys.hpp"
#include "posctl/types.hpp"

#include <vector>

namespace posctl {

struct GramianPair {
    Matrix Xc;  // controllability: Acl Xc + Xc Acl^T + B B^T = 0
    Matrix Xo;  // observability:   Acl^T Xo + Xo Acl + C^T C = 0
};

// Throws NonHurwitz when the closed loop is not Hurwitz.
GramianPair gramians(const PositiveSystem& sys, const ControlVector& u);

// Squared H2 norm <C^T C, Xc>; +inf when the closed loop is not Hurwitz.
double j2(const PositiveSystem& sys, const ControlVector& u);

// 2 K^dagger(Xc Xo). Throws NonHurwitz.
Vector grad_j2(const PositiveSystem& sys, const ControlVector& u);

// sigma_max(-C Acl^{-1} B): for positive systems the peak gain sits at zero
// frequency. +inf when the closed loop is not Hurwitz.
double jinf(const PositiveSystem& sys, const ControlVector& u);

// Decomposition of the closed loop into the weakly connected components of
// G(A) together with the B columns and C rows that touch each of them.
struct BlockStructure {
    struct Block {
        std::vector<int> states;
        std::vector<int> inputs;   // columns of B
        std::vector<int> outputs;  // rows of C
    };
    std::vector<Block> blocks;
};

// Throws AssumptionViolation if a column of B or a row of C couples two
// components.
BlockStructure block_structure(const PositiveSystem& sys);

struct BlockGradient {
    int block = 0;
    double value = 0.0;  // J_inf of this block
    Vector gradient;     // full-length gradient of the block value w.r.t. u
};

struct SubgradientBundle {
    double value = 0.0;                // J_inf(u) = max over blocks
    std::vector<BlockGradient> blocks; // blocks within tie_tolerance of value
    double tie_tolerance = 0.0;
};

inline double default_tie_tolerance(double value) { return 1e-8 * (1.0 + value); }

// Every block with its value and gradient, in block order. Throws NonHurwitz.
std::vector<BlockGradient> jinf_block_gradients(const PositiveSystem& sys,
                                                const BlockStructure& structure,
                                                const ControlVector& u);

// Keeps the blocks within `tie_tolerance` of the maximum.
SubgradientBundle make_bundle(std::vector<BlockGradient> all, double tie_tolerance);

// Bundle with the default tie tolerance 1e-8 (1 + J_inf).
SubgradientBundle jinf_blocks(const PositiveSystem& sys, const ControlVector& u);

struct DescentDirection {
    Vector v;           // -(F alpha + grad g)
    Vector alpha;       // weights on the bundle gradients
    double slope = 0.0; // max_j v^T (f_j + grad g), the directional derivative bound
    bool certified_descent = false;
};

// Solves  min_{alpha in simplex, t} t  s.t.  v^T (f_j + grad g) <= t for all j,
// v = -(F alpha + grad g). Descent is certified when t lies below the rounding
// level 1e-13 |v| max_j |f_j + grad g|.
DescentDirection optimal_subgradient_direction(const SubgradientBundle& bundle,
                                               const Vector& grad_g);

// min over alpha in the simplex of |F alpha + grad g|_inf, by LP.
double stationarity_check(const SubgradientBundle& bundle, const Vector& grad_g);

struct SymmetricPartBounds {
    double j2_bound = 0.0;
    double jinf_bound = 0.0;
};

// With Ls = (L + L^T)/2 and H = Ls + diag(u):  trace(H^{-1})/2 bounds J2 and
// 1/lambda_min(H) bounds J_inf of the directed leader system. Throws Singular
// if H is not positive definite.
SymmetricPartBounds symmetric_part_bounds(const Matrix& L, const Vector& u);

}  // namespace posctl
