#pragma once

#include "w2d/geom.hpp"

#include <array>
#include <memory>
#include <unordered_map>
#include <vector>

namespace w2d {

// Shortley-Weller cut-cell grid: interior lattice points of the domain plus
// boundary-intersection points on grid lines. Immutable after build.
class CutCellGrid {
 public:
  struct Arm {
    int neighbor = -1;       // interior node index, or boundary node index
    double len = 0.0;        // physical arm length, in (0, h]
    bool to_boundary = false;
  };

  static std::shared_ptr<const CutCellGrid> build(std::shared_ptr<const GraphDomain> domain,
                                                  double h);

  const GraphDomain& domain() const { return *domain_; }
  std::shared_ptr<const GraphDomain> domain_ptr() const { return domain_; }
  double h() const { return h_; }
  int dim() const { return domain_->dim(); }

  int n_interior() const { return int(interior_.size()); }
  int n_boundary() const { return int(boundary_.size()); }
  const Vec3& interior_pos(int i) const { return interior_[i]; }
  const Vec3& boundary_pos(int b) const { return boundary_[b]; }
  bool boundary_on_graph(int b) const { return boundary_on_graph_[b] != 0; }

  // arm in direction dir (0..2n-1): axis = dir/2, sign = dir%2 ? - : +
  const Arm& arm(int i, int dir) const { return arms_[i][dir]; }

  // all 2n arms of length exactly h ending at interior nodes
  bool full_uniform_stencil(int i) const { return uniform_[i] != 0; }
  // additionally all 2^n diagonal lattice neighbors interior (mixed stencil)
  bool full_cross_stencil(int i) const { return cross_[i] != 0; }

  const std::array<int, 3>& lattice_index(int i) const { return lattice_[i]; }
  int interior_at(const std::array<int, 3>& idx) const;

 private:
  std::shared_ptr<const GraphDomain> domain_;
  double h_ = 0.0;
  std::vector<Vec3> interior_;
  std::vector<Vec3> boundary_;
  std::vector<char> boundary_on_graph_;
  std::vector<std::array<Arm, 6>> arms_;
  std::vector<char> uniform_;
  std::vector<char> cross_;
  std::vector<std::array<int, 3>> lattice_;
  std::unordered_map<std::int64_t, int> index_;
};

// Values of a scalar field on a cut-cell grid; boundary entries carry
// Dirichlet data.
struct GridFunction {
  std::shared_ptr<const CutCellGrid> grid;
  Eigen::VectorXd interior;
  Eigen::VectorXd boundary;

  double h() const { return grid->h(); }
  int dim() const { return grid->dim(); }

  static GridFunction zeros(std::shared_ptr<const CutCellGrid> g);
};

// Pointwise max |u| over interior and boundary nodes.
double max_abs(const GridFunction& u);

}  // namespace w2d
