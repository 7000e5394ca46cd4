#include "w2d/norms.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace w2d {

namespace {

bool half_open_contains(const DyadicCube& q, const Vec3& x) {
  for (int d = 0; d < q.dim; ++d) {
    double t = std::ldexp(x[d], q.level);  // exact
    if (t < double(q.corner[d]) || t >= double(q.corner[d] + 1)) return false;
  }
  return true;
}

}  // namespace

bool region_contains(const Region& region, const Vec3& x) {
  if (std::holds_alternative<AllRegion>(region)) return true;
  if (const auto* ball = std::get_if<BallRegion>(&region))
    return (x - ball->center).norm() < ball->r;
  if (const auto* pr = std::get_if<PredicateRegion>(&region)) return pr->pred(x);
  const auto& cs = std::get<CubeSetRegion>(region);
  for (int id : cs.cube_ids)
    if (half_open_contains(cs.cover->cubes()[id].cube, x)) return true;
  return false;
}

namespace {

// Fast path for cube sets: nodes on shared faces are counted once because we
// iterate nodes, not cubes.
template <typename Value>
double mass_impl(const CutCellGrid& grid, double delta, const Region& region,
                 const std::vector<char>* valid, Value value, long* count) {
  const double cell = std::pow(grid.h(), grid.dim());
  double sum = 0.0;
  long cnt = 0;
  for (int i = 0; i < grid.n_interior(); ++i) {
    if (valid && !(*valid)[i]) continue;
    if (!region_contains(region, grid.interior_pos(i))) continue;
    sum += std::pow(std::abs(value(i)), delta) * cell;
    ++cnt;
  }
  if (count) *count = cnt;
  return sum;
}

double finish(double mass, double delta, long count, const char* what) {
  if (count == 0)
    throw input_error(std::string(what) + ": region contains no usable grid nodes");
  return std::pow(mass, 1.0 / delta);
}

}  // namespace

double quasi_norm(const GridFunction& u, double delta, const Region& region) {
  if (!(delta > 0.0)) throw input_error("quasi_norm: delta must be positive");
  long cnt = 0;
  double m = mass_impl(*u.grid, delta, region, nullptr,
                       [&](int i) { return u.interior[i]; }, &cnt);
  return finish(m, delta, cnt, "quasi_norm(u)");
}

double quasi_norm(const GradientField& du, double delta, const Region& region) {
  if (!(delta > 0.0)) throw input_error("quasi_norm: delta must be positive");
  long cnt = 0;
  double m = mass_impl(*du.grid, delta, region, &du.valid,
                       [&](int i) { return du.g[i].norm(); }, &cnt);
  return finish(m, delta, cnt, "quasi_norm(Du)");
}

double quasi_norm(const HessianField& d2u, double delta, const Region& region) {
  if (!(delta > 0.0)) throw input_error("quasi_norm: delta must be positive");
  long cnt = 0;
  double m = mass_impl(*d2u.grid, delta, region, &d2u.valid,
                       [&](int i) { return d2u.H[i].norm(); }, &cnt);
  return finish(m, delta, cnt, "quasi_norm(D2u)");
}

double delta_mass(const HessianField& d2u, double delta, const Region& region) {
  return mass_impl(*d2u.grid, delta, region, &d2u.valid,
                   [&](int i) { return d2u.H[i].norm(); }, nullptr);
}

double sup_norm(const GridFunction& u, const Region& region) {
  double m = 0.0;
  bool any = false;
  for (int i = 0; i < u.grid->n_interior(); ++i) {
    if (!region_contains(region, u.grid->interior_pos(i))) continue;
    m = std::max(m, std::abs(u.interior[i]));
    any = true;
  }
  for (int b = 0; b < u.grid->n_boundary(); ++b) {
    if (!region_contains(region, u.grid->boundary_pos(b))) continue;
    m = std::max(m, std::abs(u.boundary[b]));
    any = true;
  }
  if (!any) throw input_error("sup_norm: empty region");
  return m;
}

double lp_norm(const GridFunction& u, double p, const Region& region) {
  return quasi_norm(u, p, region);
}

double holder_norm_g(const CutCellGrid& grid, const Eigen::VectorXd& g, double alpha,
                     const std::optional<BallRegion>& window) {
  if (int(g.size()) != grid.n_boundary())
    throw input_error("holder_norm_g: data size mismatch");
  const int n = grid.dim();
  struct Sample {
    Vec3 xp;      // tangential coordinates
    double val;
  };
  // the trace norm lives on the graph portion {x_n = phi(x')} of the
  // boundary; spherical-cap nodes do not belong to it
  std::vector<Sample> pts;
  double sup_g = 0.0;
  for (int b = 0; b < grid.n_boundary(); ++b) {
    const Vec3& p = grid.boundary_pos(b);
    if (window && (p - window->center).norm() >= window->r) continue;
    if (!grid.boundary_on_graph(b)) continue;
    sup_g = std::max(sup_g, std::abs(g[b]));
    Sample s;
    s.xp = Vec3::Zero();
    s.xp.head(n - 1) = p.head(n - 1);
    s.val = g[b];
    pts.push_back(s);
  }
  if (pts.size() < 3) throw input_error("holder_norm_g: fewer than 3 boundary samples");

  // tangential gradients by finite differences of the parameterized trace
  struct GradSample {
    Vec3 xp;
    Vec3 dg;
  };
  // Gradients are taken on the x'-lattice subfamily only (vertical-arm
  // nodes): centered differences there are second order, and pair
  // separations stay >= h so finite-difference noise cannot blow up the
  // Hölder quotient.
  std::vector<GradSample> grads;
  const double h = grid.h();
  if (n == 2) {
    std::map<std::int64_t, const Sample*> lattice;
    for (const auto& s : pts) {
      double t = s.xp[0] / h, rt = std::round(t);
      if (std::abs(t - rt) <= 1e-6) lattice[std::int64_t(rt)] = &s;
    }
    for (const auto& [k, s] : lattice) {
      auto lo = lattice.find(k - 1), hi = lattice.find(k + 1);
      if (lo == lattice.end() || hi == lattice.end()) continue;
      GradSample gs;
      gs.xp = s->xp;
      gs.dg = Vec3::Zero();
      gs.dg[0] = (hi->second->val - lo->second->val) / (2.0 * h);
      grads.push_back(gs);
    }
  } else {
    // use the x'-lattice structure of vertical-arm boundary nodes
    std::unordered_map<std::int64_t, int> lattice;
    auto key_of = [&](const Vec3& xp) -> std::optional<std::int64_t> {
      double i = xp[0] / h, j = xp[1] / h;
      double ri = std::round(i), rj = std::round(j);
      if (std::abs(i - ri) > 1e-6 || std::abs(j - rj) > 1e-6) return std::nullopt;
      return std::int64_t(std::int64_t(ri + (1 << 20)) | (std::int64_t(rj + (1 << 20)) << 21));
    };
    for (int i = 0; i < int(pts.size()); ++i)
      if (auto k = key_of(pts[i].xp)) lattice[*k] = i;
    for (const auto& [key, idx] : lattice) {
      const Vec3& xp = pts[idx].xp;
      GradSample gs;
      gs.xp = xp;
      gs.dg = Vec3::Zero();
      bool ok = true;
      for (int a = 0; a < 2 && ok; ++a) {
        Vec3 xm = xp, xq = xp;
        xm[a] -= h;
        xq[a] += h;
        auto km = key_of(xm), kq = key_of(xq);
        if (km && kq && lattice.count(*km) && lattice.count(*kq))
          gs.dg[a] = (pts[lattice[*kq]].val - pts[lattice[*km]].val) / (2.0 * h);
        else
          ok = false;
      }
      if (ok) grads.push_back(gs);
    }
    std::sort(grads.begin(), grads.end(), [](const GradSample& a, const GradSample& b) {
      if (a.xp[0] != b.xp[0]) return a.xp[0] < b.xp[0];
      return a.xp[1] < b.xp[1];
    });
  }

  double sup_dg = 0.0;
  for (const auto& gs : grads) sup_dg = std::max(sup_dg, gs.dg.norm());

  // Hölder seminorm of the gradient over sampled pairs; subsample when large
  double semi = 0.0;
  std::size_t m = grads.size();
  std::size_t stride = std::max<std::size_t>(1, m / 400);
  for (std::size_t i = 0; i < m; i += stride)
    for (std::size_t j = i + stride; j < m; j += stride) {
      double dist = (grads[i].xp - grads[j].xp).norm();
      if (dist < 1e-14) continue;
      semi = std::max(semi, (grads[i].dg - grads[j].dg).norm() / std::pow(dist, alpha));
    }
  return sup_g + sup_dg + semi;
}

}  // namespace w2d
