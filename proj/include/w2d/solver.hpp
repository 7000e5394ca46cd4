#pragma once

#include "w2d/grid.hpp"
#include "w2d/pucci.hpp"

#include <functional>

namespace w2d {

// Diagonal coefficient fields a_1(x), ..., a_n(x) valued in [lambda, Lambda].
struct DiagonalCoefficients {
  std::vector<std::function<double(const Vec3&)>> a;

  static DiagonalCoefficients constant(const std::vector<double>& values);
};

struct SolveOptions {
  // residual max-norm target for sum a_i d_ii u = f; <= 0 picks an
  // achievable target ~30 eps h^-2 max(1, |f|, |g|) above the rounding floor
  double tol = 0.0;
  long max_iterations = 1000000;
  double omega = 0.0;             // 0 = Laplacian-optimal rule 2 / (1 + sin(pi h))
};

struct SolveInfo {
  long iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;  // sampled every 64 sweeps
  double omega = 0.0;
};

// Shortley-Weller discretization of sum_i a_i(x) d_ii u = f with Dirichlet
// data g, solved by SOR relaxation. Verifies the discrete maximum principle
// when f <= 0. Throws solver_error (with history) on non-convergence.
GridFunction solve_linear(std::shared_ptr<const CutCellGrid> grid,
                          const DiagonalCoefficients& coeffs,
                          const GridFunction& f, const Eigen::VectorXd& g,
                          const Ellipticity& ell, const SolveOptions& opts = {},
                          SolveInfo* info = nullptr);

// Convenience overload: f and g given as closed forms.
GridFunction solve_linear(std::shared_ptr<const CutCellGrid> grid,
                          const DiagonalCoefficients& coeffs,
                          const std::function<double(const Vec3&)>& f,
                          const std::function<double(const Vec3&)>& g,
                          const Ellipticity& ell, const SolveOptions& opts = {},
                          SolveInfo* info = nullptr);

// Residual max-norm of the discretized equation for a given u (diagnostic).
double discrete_residual(const GridFunction& u, const DiagonalCoefficients& coeffs,
                         const GridFunction& f);

}  // namespace w2d
