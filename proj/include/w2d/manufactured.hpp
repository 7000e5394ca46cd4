#pragma once

#include "w2d/grid.hpp"

#include <functional>
#include <optional>
#include <string>

namespace w2d {

// Closed-form solution families with compatible right sides f = sum_i a_i
// d_ii u for declared diagonal coefficients a_i in [lambda, Lambda].
class ManufacturedSolution {
 public:
  // u = sum x_i^2, f = 2n (coefficients all 1)
  static ManufacturedSolution quadratic(int dim);
  // u = x_n^(1+alpha0) on flat domains; Hessian singular on {x_n = 0}
  static ManufacturedSolution power_barrier(int dim, double alpha0);
  // u = sin(x_1) sin(x_2) (n = 2) or sin(x_1) sin(x_2) sin(x_3)
  static ManufacturedSolution smooth_bump(int dim);
  // u = sin(x_1) sin(2 x_2), coefficients (1, 2), f = -9 u  (n = 2 only)
  static ManufacturedSolution anisotropic(int dim);

  static ManufacturedSolution by_name(const std::string& name, int dim,
                                      double alpha0 = 0.5);

  const std::string& name() const { return name_; }
  int dim() const { return dim_; }
  double lambda() const { return lambda_; }
  double Lambda() const { return Lambda_; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double u(const Vec3& x) const { return u_(x); }
  Vec3 grad(const Vec3& x) const { return grad_(x); }
  Eigen::Matrix3d hess(const Vec3& x) const { return hess_(x); }
  double f(const Vec3& x) const { return f_(x); }
  bool singular_at(const Vec3& x) const { return singular_ && singular_(x); }

 private:
  std::string name_;
  int dim_;
  double lambda_ = 1.0, Lambda_ = 1.0;
  std::vector<double> coeffs_;
  std::function<double(const Vec3&)> u_, f_;
  std::function<Vec3(const Vec3&)> grad_;
  std::function<Eigen::Matrix3d(const Vec3&)> hess_;
  std::function<bool(const Vec3&)> singular_;
};

struct SampledSolution {
  GridFunction u;  // interior + boundary trace
  GridFunction f;
  Eigen::VectorXd g;              // Dirichlet data on boundary nodes (= u trace)
  std::vector<int> flagged_nodes; // singular evaluation points, values omitted (0)
};

// Pointwise evaluation of the closed forms on a grid; g is the trace of u.
SampledSolution sample(const ManufacturedSolution& ms,
                       std::shared_ptr<const CutCellGrid> grid);

}  // namespace w2d
