#pragma once

#include "w2d/hessian.hpp"
#include "w2d/whitney.hpp"

#include <optional>
#include <variant>

namespace w2d {

// Node-set selector for norm computations: a ball Omega ∩ B_r(center), a
// union of Whitney cubes, an arbitrary predicate, or the whole grid.
// Cube membership is half-open ([lo, hi) per axis) so that masses over a
// disjoint cube family add up exactly.
struct BallRegion {
  Vec3 center = Vec3::Zero();
  double r = 0.0;
};
struct CubeSetRegion {
  const WhitneyCover* cover = nullptr;
  std::vector<int> cube_ids;
};
struct PredicateRegion {
  std::function<bool(const Vec3&)> pred;
};
struct AllRegion {};
using Region = std::variant<BallRegion, CubeSetRegion, PredicateRegion, AllRegion>;

bool region_contains(const Region& region, const Vec3& x);

// (sum over nodes in region of |field|^delta h^n)^(1/delta). Frobenius norm
// for matrix fields. For delta < 1 this is a quasi-norm; nothing downstream
// assumes a triangle inequality.
double quasi_norm(const GridFunction& u, double delta, const Region& region);
double quasi_norm(const GradientField& du, double delta, const Region& region);
double quasi_norm(const HessianField& d2u, double delta, const Region& region);

// delta-mass: quasi_norm^delta without the final root (the additive object).
double delta_mass(const HessianField& d2u, double delta, const Region& region);

double sup_norm(const GridFunction& u, const Region& region);
double lp_norm(const GridFunction& u, double p, const Region& region);

// ||g||_inf + ||Dg||_inf + sup pairs |Dg(x') - Dg(y')| / |x' - y'|^alpha of
// the graph-parameterized boundary trace, with finite-difference tangential
// gradients. Boundary nodes on the spherical cap contribute to ||g||_inf only.
// `window` restricts to boundary nodes within a ball when given.
double holder_norm_g(const CutCellGrid& grid, const Eigen::VectorXd& g, double alpha,
                     const std::optional<BallRegion>& window = std::nullopt);

}  // namespace w2d
