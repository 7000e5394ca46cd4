#pragma once

#include "w2d/grid.hpp"

namespace w2d {

// Per-node symmetric-matrix field; entries valid only where the node carries
// a full uniform stencil (cut nodes are flagged and skipped).
struct HessianField {
  std::shared_ptr<const CutCellGrid> grid;
  std::vector<Eigen::Matrix3d> H;
  std::vector<char> valid;
};

struct GradientField {
  std::shared_ptr<const CutCellGrid> grid;
  std::vector<Vec3> g;
  std::vector<char> valid;
};

// Central second differences on the diagonal, symmetric four-point cross
// stencil off the diagonal; exact on quadratics.
HessianField discrete_hessian(const GridFunction& u);

// Central first differences; valid where both axis neighbors are interior.
GradientField discrete_gradient(const GridFunction& u);

}  // namespace w2d
