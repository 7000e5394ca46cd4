#include "w2d/manufactured.hpp"

#include <cmath>

namespace w2d {

ManufacturedSolution ManufacturedSolution::quadratic(int dim) {
  ManufacturedSolution ms;
  ms.name_ = "quadratic";
  ms.dim_ = dim;
  ms.lambda_ = 1.0;
  ms.Lambda_ = 1.0;
  ms.coeffs_.assign(dim, 1.0);
  ms.u_ = [dim](const Vec3& x) { return x.head(dim).squaredNorm(); };
  ms.grad_ = [dim](const Vec3& x) {
    Vec3 g = Vec3::Zero();
    g.head(dim) = 2.0 * x.head(dim);
    return g;
  };
  ms.hess_ = [dim](const Vec3&) {
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    for (int d = 0; d < dim; ++d) H(d, d) = 2.0;
    return H;
  };
  ms.f_ = [dim](const Vec3&) { return 2.0 * double(dim); };
  return ms;
}

ManufacturedSolution ManufacturedSolution::power_barrier(int dim, double alpha0) {
  if (!(alpha0 > 0.0) || !(alpha0 < 1.0))
    throw input_error("power_barrier: alpha0 must lie in (0,1)");
  ManufacturedSolution ms;
  ms.name_ = "power-barrier";
  ms.dim_ = dim;
  ms.lambda_ = 1.0;
  ms.Lambda_ = 1.0;
  ms.coeffs_.assign(dim, 1.0);
  const int k = dim - 1;
  const double A = alpha0 * (1.0 + alpha0);
  ms.u_ = [k, alpha0](const Vec3& x) { return std::pow(std::max(x[k], 0.0), 1.0 + alpha0); };
  ms.grad_ = [k, alpha0](const Vec3& x) {
    Vec3 g = Vec3::Zero();
    g[k] = (1.0 + alpha0) * std::pow(std::max(x[k], 0.0), alpha0);
    return g;
  };
  ms.hess_ = [k, alpha0, A](const Vec3& x) {
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    H(k, k) = A * std::pow(x[k], alpha0 - 1.0);
    return H;
  };
  ms.f_ = [k, alpha0, A](const Vec3& x) { return A * std::pow(x[k], alpha0 - 1.0); };
  ms.singular_ = [k](const Vec3& x) { return x[k] <= 0.0; };
  return ms;
}

ManufacturedSolution ManufacturedSolution::smooth_bump(int dim) {
  ManufacturedSolution ms;
  ms.name_ = "smooth-bump";
  ms.dim_ = dim;
  ms.lambda_ = 1.0;
  ms.Lambda_ = 1.0;
  ms.coeffs_.assign(dim, 1.0);
  ms.u_ = [dim](const Vec3& x) {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= std::sin(x[d]);
    return v;
  };
  ms.grad_ = [dim](const Vec3& x) {
    Vec3 g = Vec3::Zero();
    for (int d = 0; d < dim; ++d) {
      double v = std::cos(x[d]);
      for (int e = 0; e < dim; ++e)
        if (e != d) v *= std::sin(x[e]);
      g[d] = v;
    }
    return g;
  };
  ms.hess_ = [dim](const Vec3& x) {
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) {
        double v = 1.0;
        for (int d = 0; d < dim; ++d) {
          if (d == a && d == b) v *= -std::sin(x[d]);
          else if (d == a || d == b) v *= std::cos(x[d]);
          else v *= std::sin(x[d]);
        }
        H(a, b) = v;
      }
    return H;
  };
  ms.f_ = [dim, ms_u = ms.u_](const Vec3& x) { return -double(dim) * ms_u(x); };
  return ms;
}

ManufacturedSolution ManufacturedSolution::anisotropic(int dim) {
  if (dim != 2) throw input_error("anisotropic family is n = 2 only");
  ManufacturedSolution ms;
  ms.name_ = "anisotropic";
  ms.dim_ = 2;
  ms.lambda_ = 1.0;
  ms.Lambda_ = 2.0;
  ms.coeffs_ = {1.0, 2.0};
  ms.u_ = [](const Vec3& x) { return std::sin(x[0]) * std::sin(2.0 * x[1]); };
  ms.grad_ = [](const Vec3& x) {
    Vec3 g = Vec3::Zero();
    g[0] = std::cos(x[0]) * std::sin(2.0 * x[1]);
    g[1] = 2.0 * std::sin(x[0]) * std::cos(2.0 * x[1]);
    return g;
  };
  ms.hess_ = [](const Vec3& x) {
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    H(0, 0) = -std::sin(x[0]) * std::sin(2.0 * x[1]);
    H(1, 1) = -4.0 * std::sin(x[0]) * std::sin(2.0 * x[1]);
    H(0, 1) = H(1, 0) = 2.0 * std::cos(x[0]) * std::cos(2.0 * x[1]);
    return H;
  };
  // f = 1 * u_xx + 2 * u_yy = -9 sin(x) sin(2y)
  ms.f_ = [](const Vec3& x) { return -9.0 * std::sin(x[0]) * std::sin(2.0 * x[1]); };
  return ms;
}

ManufacturedSolution ManufacturedSolution::by_name(const std::string& name, int dim,
                                                   double alpha0) {
  if (name == "quadratic") return quadratic(dim);
  if (name == "power-barrier") return power_barrier(dim, alpha0);
  if (name == "smooth-bump") return smooth_bump(dim);
  if (name == "anisotropic") return anisotropic(dim);
  throw config_error("unknown manufactured solution: " + name);
}

SampledSolution sample(const ManufacturedSolution& ms,
                       std::shared_ptr<const CutCellGrid> grid) {
  if (ms.dim() != grid->dim())
    throw input_error("sample: solution and grid dimension mismatch");
  SampledSolution out;
  out.u = GridFunction::zeros(grid);
  out.f = GridFunction::zeros(grid);
  for (int i = 0; i < grid->n_interior(); ++i) {
    const Vec3& p = grid->interior_pos(i);
    out.u.interior[i] = ms.u(p);
    if (ms.singular_at(p)) {
      out.flagged_nodes.push_back(i);
      out.f.interior[i] = 0.0;
    } else {
      out.f.interior[i] = ms.f(p);
    }
  }
  out.g.resize(grid->n_boundary());
  for (int b = 0; b < grid->n_boundary(); ++b) {
    out.g[b] = ms.u(grid->boundary_pos(b));
    out.u.boundary[b] = out.g[b];
    out.f.boundary[b] = 0.0;
  }
  return out;
}

}  // namespace w2d
