#include "w2d/hessian.hpp"

namespace w2d {

HessianField discrete_hessian(const GridFunction& u) {
  const CutCellGrid& G = *u.grid;
  const int n = G.dim();
  const double h = G.h();
  HessianField out;
  out.grid = u.grid;
  out.H.assign(G.n_interior(), Eigen::Matrix3d::Zero());
  out.valid.assign(G.n_interior(), 0);
  parallel_for(G.n_interior(), [&](long i) {
    if (!G.full_cross_stencil(i)) return;
    const auto& ix = G.lattice_index(i);
    Eigen::Matrix3d H = Eigen::Matrix3d::Zero();
    auto at = [&](int da, int db, int dc) {
      std::array<int, 3> j{ix[0] + da, ix[1] + db, ix[2] + dc};
      return u.interior[G.interior_at(j)];
    };
    double u0 = u.interior[i];
    for (int a = 0; a < n; ++a) {
      std::array<int, 3> dp{0, 0, 0}, dm{0, 0, 0};
      dp[a] = 1; dm[a] = -1;
      H(a, a) = (at(dp[0], dp[1], dp[2]) - 2.0 * u0 + at(dm[0], dm[1], dm[2])) / (h * h);
      for (int b = a + 1; b < n; ++b) {
        std::array<int, 3> pp{0, 0, 0}, pm{0, 0, 0}, mp{0, 0, 0}, mm{0, 0, 0};
        pp[a] = 1; pp[b] = 1;
        pm[a] = 1; pm[b] = -1;
        mp[a] = -1; mp[b] = 1;
        mm[a] = -1; mm[b] = -1;
        double v = (at(pp[0], pp[1], pp[2]) - at(pm[0], pm[1], pm[2]) -
                    at(mp[0], mp[1], mp[2]) + at(mm[0], mm[1], mm[2])) /
                   (4.0 * h * h);
        H(a, b) = H(b, a) = v;
      }
    }
    out.H[i] = H;
    out.valid[i] = 1;
  });
  return out;
}

GradientField discrete_gradient(const GridFunction& u) {
  const CutCellGrid& G = *u.grid;
  const int n = G.dim();
  const double h = G.h();
  GradientField out;
  out.grid = u.grid;
  out.g.assign(G.n_interior(), Vec3::Zero());
  out.valid.assign(G.n_interior(), 0);
  for (int i = 0; i < G.n_interior(); ++i) {
    if (!G.full_uniform_stencil(i)) continue;
    Vec3 g = Vec3::Zero();
    for (int a = 0; a < n; ++a) {
      const auto& plus = G.arm(i, 2 * a + 0);
      const auto& minus = G.arm(i, 2 * a + 1);
      g[a] = (u.interior[plus.neighbor] - u.interior[minus.neighbor]) / (2.0 * h);
    }
    out.g[i] = g;
    out.valid[i] = 1;
  }
  return out;
}

}  // namespace w2d
