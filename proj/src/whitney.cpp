#include "w2d/whitney.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>

namespace w2d {

namespace {

std::int64_t pack_corner(const std::array<std::int64_t, 3>& c) {
  // corners fit comfortably in 21 bits per axis for s_max <= 24 and R <= ~1
  auto enc = [](std::int64_t v) { return std::uint64_t(v + (1 << 26)) & 0x7ffffffULL; };
  return std::int64_t(enc(c[0]) | (enc(c[1]) << 27) | (std::uint64_t(enc(c[2]) & 0x3ff) << 54));
}

// Certified bounds on dist(Q, boundary surface) for a cube with all vertices
// inside the domain. Lower bounds use 1-Lipschitz continuity of the distance.
struct DistBounds {
  double lo, hi;
};

using VertexKey = std::array<std::int64_t, 3>;

struct VertexKeyHash {
  std::size_t operator()(const VertexKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto v : k) {
      h ^= std::uint64_t(v);
      h *= 0x100000001b3ULL;
    }
    return std::size_t(h);
  }
};

class CubeDist {
 public:
  explicit CubeDist(const GraphDomain& dom) : dom_(dom) {}

  // distances at lattice vertices are shared between cubes and levels; key by
  // the exact double coordinates
  double vertex_dist(const Vec3& v) const {
    VertexKey key;
    for (int d = 0; d < 3; ++d) std::memcpy(&key[d], &v[d], sizeof(double));
    auto [it, fresh] = cache_.try_emplace(key, 0.0);
    if (fresh) it->second = dom_.surface_dist(v);
    return it->second;
  }

  // exact for the flat profile
  std::optional<DistBounds> flat_exact(const DyadicCube& q) const {
    if (dom_.graph().profile() != Profile::Flat) return std::nullopt;
    const int n = dom_.dim();
    double d_plane = q.lower()[n - 1];
    double far2 = 0.0;
    Vec3 lo = q.lower(), hi = q.upper();
    for (int d = 0; d < n; ++d) {
      double v = std::max(std::abs(lo[d]), std::abs(hi[d]));
      far2 += v * v;
    }
    double d_sphere = dom_.radius() - std::sqrt(far2);
    double v = std::min(d_plane, d_sphere);
    return DistBounds{v, v};
  }

  DistBounds vertex_bounds(const DyadicCube& q) const {
    const int n = dom_.dim();
    Vec3 lo = q.lower(), hi = q.upper();
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < (1 << n); ++k) {
      Vec3 v = Vec3::Zero();
      for (int d = 0; d < n; ++d) v[d] = ((k >> d) & 1) ? hi[d] : lo[d];
      best = std::min(best, vertex_dist(v));
    }
    return DistBounds{std::max(0.0, best - 0.5 * q.diam()), best};
  }

  // Tighten by sampling the cube faces; the minimizer of the distance over a
  // cube lies on its boundary.
  DistBounds face_bounds(const DyadicCube& q, int m) const {
    const int n = dom_.dim();
    Vec3 lo = q.lower(), hi = q.upper();
    double side = q.side();
    double best = std::numeric_limits<double>::infinity();
    auto eval = [&](const Vec3& p) { best = std::min(best, dom_.surface_dist(p)); };
    if (n == 2) {
      for (int i = 0; i <= m; ++i) {
        double t = lo[0] + side * double(i) / double(m);
        Vec3 p = Vec3::Zero();
        p[0] = t; p[1] = lo[1]; eval(p);
        p[1] = hi[1]; eval(p);
        p[0] = lo[0]; p[1] = lo[1] + side * double(i) / double(m); eval(p);
        p[0] = hi[0]; eval(p);
      }
      double spacing = side / double(m);
      return DistBounds{std::max(0.0, best - 0.5 * spacing), best};
    }
    for (int i = 0; i <= m; ++i) {
      for (int j = 0; j <= m; ++j) {
        double a = side * double(i) / double(m), b = side * double(j) / double(m);
        for (int axis = 0; axis < 3; ++axis) {
          Vec3 p;
          p[axis] = lo[axis];
          p[(axis + 1) % 3] = lo[(axis + 1) % 3] + a;
          p[(axis + 2) % 3] = lo[(axis + 2) % 3] + b;
          eval(p);
          p[axis] = hi[axis];
          eval(p);
        }
      }
    }
    double spacing = side / double(m) * std::sqrt(2.0) / 2.0;
    return DistBounds{std::max(0.0, best - spacing), best};
  }

  // Resolve the Whitney window test diam <= dist <= 4 diam. Returns
  // (decided, keep, bounds).
  struct Decision {
    bool keep;
    DistBounds b;
  };

  Decision classify(const DyadicCube& q, double tol) const {
    if (auto fb = flat_exact(q)) {
      double d = q.diam();
      return {fb->lo >= d && fb->hi <= 4.0 * d, *fb};
    }
    DistBounds b = vertex_bounds(q);
    double d = q.diam();
    for (int m = 4; m <= 64; m *= 2) {
      bool keep_certain = (b.lo >= d - tol) && (b.hi <= 4.0 * d + tol);
      bool reject_certain = (b.hi < d - tol) || (b.lo > 4.0 * d + tol);
      if (keep_certain || reject_certain) return {keep_certain, b};
      DistBounds fb = face_bounds(q, m);
      b.lo = std::max(b.lo, fb.lo);
      b.hi = std::min(b.hi, fb.hi);
    }
    bool keep = (b.lo >= d - tol) && (b.hi <= 4.0 * d + tol);
    return {keep, b};
  }

 private:
  const GraphDomain& dom_;
  mutable std::unordered_map<VertexKey, double, VertexKeyHash> cache_;
};

}  // namespace

void WhitneyCover::index_cubes() {
  level_index_.assign(s_max_ + 1, {});
  for (int i = 0; i < int(cubes_.size()); ++i)
    level_index_[cubes_[i].cube.level].emplace(pack_corner(cubes_[i].cube.corner), i);
}

bool WhitneyCover::has_cube(const DyadicCube& c) const {
  if (c.level < 0 || c.level >= int(level_index_.size())) return false;
  return level_index_[c.level].count(pack_corner(c.corner)) > 0;
}

int WhitneyCover::find_cube_containing(const Vec3& x) const {
  const int n = domain_->dim();
  for (int s = 0; s < int(level_index_.size()); ++s) {
    if (level_index_[s].empty()) continue;
    // candidate corners: floor(x 2^s), and -1 offsets where x sits on a face
    std::array<std::int64_t, 3> base{0, 0, 0};
    std::array<bool, 3> on_face{false, false, false};
    for (int d = 0; d < n; ++d) {
      double t = std::ldexp(x[d], s);
      double fl = std::floor(t);
      base[d] = std::int64_t(fl);
      on_face[d] = (t == fl);
    }
    int combos = 1 << n;
    for (int k = 0; k < combos; ++k) {
      std::array<std::int64_t, 3> c = base;
      bool valid = true;
      for (int d = 0; d < n; ++d) {
        if ((k >> d) & 1) {
          if (!on_face[d]) { valid = false; break; }
          c[d] -= 1;
        }
      }
      if (!valid) continue;
      auto it = level_index_[s].find(pack_corner(c));
      if (it != level_index_[s].end()) return it->second;
    }
  }
  return -1;
}

bool WhitneyCover::dilated_in_omega(int cube_id, double quarter_radius) const {
  const auto& q = cubes_[cube_id].cube;
  const int n = domain_->dim();
  DilatedCube dq{q};
  Vec3 lo = dq.lower(), hi = dq.upper();
  // every dilated vertex strictly inside B_quarter
  for (int k = 0; k < (1 << n); ++k) {
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) {
      double v = ((k >> d) & 1) ? hi[d] : lo[d];
      r2 += v * v;
    }
    if (r2 >= quarter_radius * quarter_radius) return false;
  }
  // bottom face strictly above the graph
  double phimax = domain_->graph().max_on_box(lo, hi, n - 1);
  return lo[n - 1] > phimax;
}

WhitneyCover WhitneyCover::from_cubes(std::shared_ptr<const GraphDomain> domain,
                                      int s_max, std::vector<CubeInfo> cubes) {
  WhitneyCover cover;
  cover.domain_ = std::move(domain);
  cover.s_max_ = s_max;
  cover.cubes_ = std::move(cubes);
  std::sort(cover.cubes_.begin(), cover.cubes_.end(), [](const CubeInfo& a, const CubeInfo& b) {
    if (a.cube.level != b.cube.level) return a.cube.level < b.cube.level;
    return a.cube.corner < b.cube.corner;
  });
  cover.index_cubes();
  double covered = 0.0;
  for (const auto& ci : cover.cubes_)
    covered += std::ldexp(1.0, -ci.cube.level * cover.domain_->dim());
  cover.covered_measure_ = covered;
  cover.residual_measure_ = std::max(0.0, cover.domain_->measure() - covered) + 1e-9;
  return cover;
}

WhitneyCover WhitneyCover::build(std::shared_ptr<const GraphDomain> domain, int s_max) {
  const GraphDomain& dom = *domain;
  const int n = dom.dim();
  const double R = dom.radius();
  const double tol = 1e-8 * R;
  CubeDist cd(dom);

  std::vector<CubeInfo> kept;

  // quick pruning helpers
  auto outside_domain = [&](const DyadicCube& q) {
    Vec3 lo = q.lower(), hi = q.upper();
    double near2 = 0.0;
    for (int d = 0; d < n; ++d) {
      double dd = (lo[d] <= 0.0 && hi[d] >= 0.0) ? 0.0 : std::min(std::abs(lo[d]), std::abs(hi[d]));
      near2 += dd * dd;
    }
    if (near2 >= R * R) return true;  // entirely outside the ball
    double phimin = dom.graph().min_on_box(lo, hi, n - 1);
    return hi[n - 1] < phimin;  // entirely below the graph
  };
  auto vertices_inside = [&](const DyadicCube& q) {
    Vec3 lo = q.lower(), hi = q.upper();
    for (int k = 0; k < (1 << n); ++k) {
      Vec3 v = Vec3::Zero();
      for (int d = 0; d < n; ++d) v[d] = ((k >> d) & 1) ? hi[d] : lo[d];
      if (!dom.contains(v)) return false;
    }
    return true;
  };

  std::vector<DyadicCube> stack;
  std::int64_t c0 = std::int64_t(std::floor(-R));
  std::int64_t c1 = std::int64_t(std::ceil(R));
  for (std::int64_t i = c0; i < c1; ++i)
    for (std::int64_t j = c0; j < c1; ++j) {
      if (n == 2) {
        stack.push_back(DyadicCube{0, {i, j, 0}, 2});
      } else {
        for (std::int64_t k = c0; k < c1; ++k)
          stack.push_back(DyadicCube{0, {i, j, k}, 3});
      }
    }

  while (!stack.empty()) {
    DyadicCube q = stack.back();
    stack.pop_back();
    if (outside_domain(q)) continue;
    if (vertices_inside(q)) {
      auto dec = cd.classify(q, tol);
      if (dec.keep) {
        kept.push_back(CubeInfo{q, dec.b.lo, dec.b.hi});
        continue;  // descendants of kept cubes are not candidates
      }
    }
    if (q.level < s_max)
      for (int k = 0; k < (1 << n); ++k) stack.push_back(q.child(k));
  }

  return from_cubes(std::move(domain), s_max, std::move(kept));
}

WhitneyCover decompose(std::shared_ptr<const GraphDomain> domain, int s_max) {
  if (s_max < 2 || s_max > 24)
    throw config_error("decompose: s_max must lie in [2, 24]");
  if (domain->measure() <= 0.0)
    throw input_error("decompose: domain has empty interior");
  return WhitneyCover::build(std::move(domain), s_max);
}

int overlap_count(const WhitneyCover& cover, const Vec3& x) {
  const int n = cover.domain().dim();
  int count = 0;
  // per level, only corners within the 6/5 window can contain x
  for (int s = 0; s <= cover.s_max(); ++s) {
    std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int d = 0; d < n; ++d) {
      double t = std::ldexp(x[d], s);
      lo[d] = std::int64_t(std::ceil(t - 1.1 - 1e-12));
      hi[d] = std::int64_t(std::floor(t + 0.1 + 1e-12));
    }
    std::array<std::int64_t, 3> c = lo;
    while (true) {
      DyadicCube q{s, c, n};
      if (cover.has_cube(q) && DilatedCube{q}.contains_point(x)) ++count;
      int d = 0;
      for (; d < n; ++d) {
        if (++c[d] <= hi[d]) break;
        c[d] = lo[d];
      }
      if (d == n) break;
    }
  }
  return count;
}

std::vector<LayerSet> layers(const WhitneyCover& cover, double quarter_radius) {
  std::vector<LayerSet> out;
  std::vector<std::vector<int>> by_level(cover.s_max() + 1);
  for (int i = 0; i < int(cover.cubes().size()); ++i)
    if (cover.dilated_in_omega(i, quarter_radius))
      by_level[cover.cubes()[i].cube.level].push_back(i);
  for (int s = 0; s <= cover.s_max(); ++s)
    out.push_back(LayerSet{s, std::move(by_level[s])});
  return out;
}

double layer_measure(const WhitneyCover& cover, const LayerSet& layer) {
  return double(layer.cube_ids.size()) *
         std::ldexp(1.0, -layer.s * cover.domain().dim());
}

DyadicSum dyadic_sum(const WhitneyCover& cover, double q, double quarter_radius) {
  if (!(q > 0.0)) throw input_error("dyadic_sum: q must be positive");
  DyadicSum out;
  auto ls = layers(cover, quarter_radius);
  for (const auto& layer : ls) {
    if (layer.cube_ids.empty()) continue;
    double d = std::ldexp(std::sqrt(double(cover.domain().dim())), -layer.s);
    double S = double(layer.cube_ids.size()) * std::pow(d, q);
    out.per_level.emplace_back(layer.s, S);
    out.total += S;
  }
  return out;
}

bool verify_cover_inclusion(const WhitneyCover& cover, double inner_radius,
                            double quarter_radius, int samples, std::uint64_t seed,
                            std::vector<Vec3>* uncovered) {
  if (!(inner_radius <= quarter_radius / 3.0 + 1e-15))
    throw contract_error("verify_cover_inclusion: need inner_radius <= quarter_radius / 3");
  const GraphDomain& dom = cover.domain();
  const int n = dom.dim();
  const double cut = std::ldexp(1.0, -cover.s_max() + 3);

  // quarter-family membership cache per cube id
  std::vector<char> in_family(cover.cubes().size());
  for (int i = 0; i < int(cover.cubes().size()); ++i)
    in_family[i] = cover.dilated_in_omega(i, quarter_radius) ? 1 : 0;

  bool ok = true;
  std::uint64_t index = seed % 100000 + 1;
  int accepted = 0;
  while (accepted < samples) {
    Vec3 x = Vec3::Zero();
    x[0] = (2.0 * halton(index, 2) - 1.0) * inner_radius;
    x[n - 1] = (2.0 * halton(index, n == 2 ? 3 : 5) - 1.0) * inner_radius;
    if (n == 3) x[1] = (2.0 * halton(index, 3) - 1.0) * inner_radius;
    ++index;
    if (x.head(n).norm() >= inner_radius || !dom.contains(x)) continue;
    ++accepted;
    if (dom.surface_dist(x) <= cut) continue;
    int id = cover.find_cube_containing(x);
    if (id < 0 || !in_family[id]) {
      ok = false;
      if (uncovered) uncovered->push_back(x);
    }
  }
  return ok;
}

}  // namespace w2d
