#include "w2d/grid.hpp"

#include <cmath>

namespace w2d {

namespace {

std::int64_t pack_idx(const std::array<int, 3>& c) {
  auto enc = [](int v) { return std::uint64_t(v + (1 << 20)) & 0x1fffffULL; };
  return std::int64_t(enc(c[0]) | (enc(c[1]) << 21) | (enc(c[2]) << 42));
}

}  // namespace

int CutCellGrid::interior_at(const std::array<int, 3>& idx) const {
  auto it = index_.find(pack_idx(idx));
  return it == index_.end() ? -1 : it->second;
}

std::shared_ptr<const CutCellGrid> CutCellGrid::build(
    std::shared_ptr<const GraphDomain> domain, double h) {
  if (!(h > 0.0)) throw input_error("CutCellGrid: h must be positive");
  auto grid = std::make_shared<CutCellGrid>();
  grid->domain_ = domain;
  grid->h_ = h;
  const GraphDomain& dom = *domain;
  const int n = dom.dim();
  const double R = dom.radius();

  auto pos_of = [&](const std::array<int, 3>& idx) {
    Vec3 p = Vec3::Zero();
    for (int d = 0; d < n; ++d) p[d] = double(idx[d]) * h;
    return p;
  };

  const int lim = int(std::ceil(R / h)) + 1;
  std::array<int, 3> idx{0, 0, 0};
  const int klo = (n == 3) ? -lim : 0, khi = (n == 3) ? lim : 0;
  for (int i = -lim; i <= lim; ++i)
    for (int j = -lim; j <= lim; ++j)
      for (int k = klo; k <= khi; ++k) {
        idx = {i, j, k};
        Vec3 p = pos_of(idx);
        if (!dom.contains(p)) continue;
        grid->index_.emplace(pack_idx(idx), int(grid->interior_.size()));
        grid->interior_.push_back(p);
        grid->lattice_.push_back(idx);
      }

  const int ni = grid->n_interior();
  grid->arms_.resize(ni);
  grid->uniform_.assign(ni, 0);
  grid->cross_.assign(ni, 0);

  // first crossing of the boundary along a unit lattice arm
  auto cut_point = [&](const Vec3& from, int axis, int sign) {
    auto inside = [&](double t) {
      Vec3 p = from;
      p[axis] += sign * t * h;
      return dom.contains(p);
    };
    double lo = 0.0, hi = 1.0;
    const int sub = 16;
    for (int s = 1; s <= sub; ++s) {
      double t = double(s) / double(sub);
      if (!inside(t)) { hi = t; lo = t - 1.0 / double(sub); break; }
    }
    for (int it = 0; it < 60; ++it) {
      double mid = 0.5 * (lo + hi);
      if (inside(mid)) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  for (int i = 0; i < ni; ++i) {
    const Vec3& p = grid->interior_[i];
    const std::array<int, 3>& ix = grid->lattice_[i];
    bool uniform = true;
    for (int axis = 0; axis < n; ++axis) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        int dir = 2 * axis + sgn;
        int sign = sgn ? -1 : 1;
        std::array<int, 3> nb = ix;
        nb[axis] += sign;
        int nb_id = grid->interior_at(nb);
        Arm arm;
        if (nb_id >= 0) {
          arm.neighbor = nb_id;
          arm.len = h;
          arm.to_boundary = false;
        } else {
          double t = cut_point(p, axis, sign);
          Vec3 bp = p;
          bp[axis] += sign * t * h;
          arm.neighbor = int(grid->boundary_.size());
          arm.len = std::max(t * h, 1e-14 * h);
          arm.to_boundary = true;
          grid->boundary_.push_back(bp);
          // classify: graph part vs spherical part of the boundary
          double gap = std::abs(bp[n - 1] - dom.graph().value(bp, n - 1));
          grid->boundary_on_graph_.push_back(gap <= 1e-7 * std::max(1.0, R) ? 1 : 0);
          uniform = false;
        }
        grid->arms_[i][dir] = arm;
      }
    }
    grid->uniform_[i] = uniform ? 1 : 0;
  }

  for (int i = 0; i < ni; ++i) {
    if (!grid->uniform_[i]) continue;
    const std::array<int, 3>& ix = grid->lattice_[i];
    bool ok = true;
    if (n == 2) {
      for (int a = -1; a <= 1 && ok; a += 2)
        for (int b = -1; b <= 1 && ok; b += 2)
          ok = grid->interior_at({ix[0] + a, ix[1] + b, 0}) >= 0;
    } else {
      for (int a = -1; a <= 1 && ok; a += 2)
        for (int b = -1; b <= 1 && ok; b += 2)
          for (int c = -1; c <= 1 && ok; c += 2)
            ok = grid->interior_at({ix[0] + a, ix[1] + b, ix[2] + c}) >= 0;
    }
    grid->cross_[i] = ok ? 1 : 0;
  }

  return grid;
}

GridFunction GridFunction::zeros(std::shared_ptr<const CutCellGrid> g) {
  GridFunction f;
  f.interior = Eigen::VectorXd::Zero(g->n_interior());
  f.boundary = Eigen::VectorXd::Zero(g->n_boundary());
  f.grid = std::move(g);
  return f;
}

double max_abs(const GridFunction& u) {
  double m = 0.0;
  if (u.interior.size() > 0) m = u.interior.cwiseAbs().maxCoeff();
  if (u.boundary.size() > 0) m = std::max(m, u.boundary.cwiseAbs().maxCoeff());
  return m;
}

}  // namespace w2d
