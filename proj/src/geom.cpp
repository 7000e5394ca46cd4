#include "w2d/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace w2d {

std::string profile_name(Profile p) {
  switch (p) {
    case Profile::Flat: return "flat";
    case Profile::PowerCusp: return "power-cusp";
    case Profile::Sinusoid: return "sinusoid";
  }
  return "?";
}

Profile profile_from_name(const std::string& name) {
  if (name == "flat") return Profile::Flat;
  if (name == "power-cusp") return Profile::PowerCusp;
  if (name == "sinusoid") return Profile::Sinusoid;
  throw config_error("unknown boundary profile: " + name);
}

HolderGraph HolderGraph::flat() {
  return HolderGraph(Profile::Flat, 0.0, 0.0, 0.0, 1.0);
}

HolderGraph HolderGraph::power_cusp(double amplitude, double alpha) {
  if (!(amplitude >= 0.0) || !(alpha > 0.0) || !(alpha <= 1.0))
    throw input_error("power_cusp: need amplitude >= 0 and alpha in (0,1]");
  // |Dphi(x) - Dphi(y)| <= 3 c (1+alpha) |x-y|^alpha for the radial power
  // profile; the same constant dominates the Lipschitz bound on B'_1.
  double K = 3.0 * amplitude * (1.0 + alpha);
  return HolderGraph(Profile::PowerCusp, amplitude, alpha, K, alpha);
}

HolderGraph HolderGraph::sinusoid(double amplitude, double frequency) {
  if (!(amplitude >= 0.0) || !(frequency > 0.0))
    throw input_error("sinusoid: need amplitude >= 0, frequency > 0");
  // Up to two tangential components contribute to the argument, so the
  // gradient norm is a k sqrt(2) at worst and its Lipschitz constant 2 a k^2.
  double K = std::max(amplitude * frequency * std::sqrt(2.0),
                      2.0 * amplitude * frequency * frequency);
  return HolderGraph(Profile::Sinusoid, amplitude, frequency, K, 1.0);
}

double HolderGraph::value(const Vec3& x, int m) const {
  switch (profile_) {
    case Profile::Flat: return 0.0;
    case Profile::PowerCusp: {
      double r = x.head(m).norm();
      return amplitude_ * std::pow(r, 1.0 + frequency_);
    }
    case Profile::Sinusoid: {
      double t = x.head(m).sum();
      return amplitude_ * std::sin(frequency_ * t);
    }
  }
  return 0.0;
}

Vec3 HolderGraph::gradient(const Vec3& x, int m) const {
  Vec3 g = Vec3::Zero();
  switch (profile_) {
    case Profile::Flat: break;
    case Profile::PowerCusp: {
      double r = x.head(m).norm();
      if (r > 0.0) {
        double s = amplitude_ * (1.0 + frequency_) * std::pow(r, frequency_ - 1.0);
        g.head(m) = s * x.head(m);
      }
      break;
    }
    case Profile::Sinusoid: {
      double t = x.head(m).sum();
      double s = amplitude_ * frequency_ * std::cos(frequency_ * t);
      for (int d = 0; d < m; ++d) g[d] = s;
      break;
    }
  }
  return g;
}

namespace {

// max of a*sin(w*t) over t in [lo, hi]
double sin_extreme(double a, double w, double lo, double hi, bool want_max) {
  double s = want_max ? 1.0 : -1.0;
  double best = s * a * std::sin(w * lo);
  best = std::max(best, s * a * std::sin(w * hi));
  // interior critical points w*t = pi/2 + k*pi
  const double pi = std::numbers::pi;
  double k0 = std::ceil((w * lo - pi / 2.0) / pi);
  for (double k = k0; pi / 2.0 + k * pi <= w * hi + 1e-15; k += 1.0) {
    double t = (pi / 2.0 + k * pi) / w;
    if (t >= lo - 1e-15 && t <= hi + 1e-15)
      best = std::max(best, s * a * std::sin(w * t));
  }
  return s * best;
}

}  // namespace

double HolderGraph::max_on_box(const Vec3& lo, const Vec3& hi, int m) const {
  switch (profile_) {
    case Profile::Flat: return 0.0;
    case Profile::PowerCusp: {
      // radially increasing: max |x'| at the corner farthest from the origin
      double r2 = 0.0;
      for (int d = 0; d < m; ++d) {
        double v = std::max(std::abs(lo[d]), std::abs(hi[d]));
        r2 += v * v;
      }
      return amplitude_ * std::pow(std::sqrt(r2), 1.0 + frequency_);
    }
    case Profile::Sinusoid: {
      double slo = 0.0, shi = 0.0;
      for (int d = 0; d < m; ++d) { slo += lo[d]; shi += hi[d]; }
      return sin_extreme(amplitude_, frequency_, slo, shi, true);
    }
  }
  return 0.0;
}

double HolderGraph::min_on_box(const Vec3& lo, const Vec3& hi, int m) const {
  switch (profile_) {
    case Profile::Flat: return 0.0;
    case Profile::PowerCusp: {
      // radially increasing: min |x'| at the box point nearest the origin
      double r2 = 0.0;
      for (int d = 0; d < m; ++d) {
        double dd = (lo[d] <= 0.0 && hi[d] >= 0.0)
                        ? 0.0
                        : std::min(std::abs(lo[d]), std::abs(hi[d]));
        r2 += dd * dd;
      }
      return amplitude_ * std::pow(std::sqrt(r2), 1.0 + frequency_);
    }
    case Profile::Sinusoid: {
      double slo = 0.0, shi = 0.0;
      for (int d = 0; d < m; ++d) { slo += lo[d]; shi += hi[d]; }
      return sin_extreme(amplitude_, frequency_, slo, shi, false);
    }
  }
  return 0.0;
}

GraphDomain::GraphDomain(HolderGraph graph, double radius, int dim)
    : graph_(std::move(graph)), radius_(radius), dim_(dim) {
  if (dim != 2 && dim != 3) throw input_error("GraphDomain: dim must be 2 or 3");
  if (!(radius > 0.0)) throw input_error("GraphDomain: radius must be positive");
}

bool GraphDomain::contains(const Vec3& x) const {
  if (x.head(dim_).norm() >= radius_) return false;
  return x[dim_ - 1] > graph_.value(x, dim_ - 1);
}

bool GraphDomain::contains(const Eigen::VectorXd& x) const {
  if (int(x.size()) != dim_)
    throw input_error("contains: point has dimension " + std::to_string(x.size()) +
                      ", domain has dimension " + std::to_string(dim_));
  Vec3 p = Vec3::Zero();
  p.head(dim_) = x;
  return contains(p);
}

double GraphDomain::vertical_clearance(const Vec3& x) const {
  return x[dim_ - 1] - graph_.value(x, dim_ - 1);
}

double GraphDomain::dist_lower_bound(const Vec3& x) const {
  double K = graph_.lipschitz_bound();
  double g = vertical_clearance(x) / std::sqrt(1.0 + K * K);
  double s = radius_ - x.head(dim_).norm();
  return std::max(0.0, std::min(g, s));
}

namespace {

double golden_min(const std::function<double(double)>& f, double a, double b,
                  double fa_mid) {
  (void)fa_mid;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 90 && (b - a) > 1e-14; ++it) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return std::min(fc, fd);
}

}  // namespace

double GraphDomain::graph_dist_1d(const Vec3& x) const {
  const double x0 = x[0], xn = x[1];
  auto dist2 = [&](double y) {
    Vec3 p = Vec3::Zero();
    p[0] = y;
    double ph = graph_.value(p, 1);
    return (x0 - y) * (x0 - y) + (xn - ph) * (xn - ph);
  };
  // vertical candidate bounds the search window
  double cap = std::abs(xn - graph_.value(x, 1)) * (1.0 + 1e-12) + 1e-14;
  double lo = std::max(-radius_, x0 - cap), hi = std::min(radius_, x0 + cap);
  // coarse sampling fine enough to separate local-minimum basins
  int m = 33;
  if (graph_.profile() == Profile::Sinusoid) {
    double period = 2.0 * std::numbers::pi / graph_.frequency();
    m = std::max(17, int((hi - lo) / (period / 16.0)) + 2);
  }
  m = std::min(m, 4097);
  std::vector<double> ys(m), vs(m);
  for (int i = 0; i < m; ++i) {
    ys[i] = lo + (hi - lo) * double(i) / double(m - 1);
    vs[i] = dist2(ys[i]);
  }
  // the cusp kink is a candidate minimizer
  double best = *std::min_element(vs.begin(), vs.end());
  if (graph_.profile() == Profile::PowerCusp && 0.0 >= lo && 0.0 <= hi)
    best = std::min(best, dist2(0.0));
  for (int i = 0; i < m; ++i) {
    bool loc = (i == 0 || vs[i] <= vs[i - 1]) && (i == m - 1 || vs[i] <= vs[i + 1]);
    if (!loc) continue;
    double a = ys[std::max(0, i - 1)], b = ys[std::min(m - 1, i + 1)];
    best = std::min(best, golden_min(dist2, a, b, vs[i]));
  }
  return std::sqrt(std::max(0.0, best));
}

double GraphDomain::graph_dist_2d(const Vec3& x) const {
  auto dist2 = [&](double y0, double y1) {
    Vec3 p = Vec3::Zero();
    p[0] = y0; p[1] = y1;
    double ph = graph_.value(p, 2);
    double d0 = x[0] - y0, d1 = x[1] - y1, d2 = x[2] - ph;
    return d0 * d0 + d1 * d1 + d2 * d2;
  };
  double cap = std::abs(x[2] - graph_.value(x, 2)) * (1.0 + 1e-12) + 1e-14;
  double lo0 = x[0] - cap, hi0 = x[0] + cap;
  double lo1 = x[1] - cap, hi1 = x[1] + cap;
  const int m = 25;
  double best = dist2(x[0], x[1]);
  double by0 = x[0], by1 = x[1];
  auto consider = [&](double y0, double y1) {
    if (y0 * y0 + y1 * y1 > radius_ * radius_) return;
    double v = dist2(y0, y1);
    if (v < best) { best = v; by0 = y0; by1 = y1; }
  };
  consider(0.0, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      consider(lo0 + (hi0 - lo0) * i / double(m - 1),
               lo1 + (hi1 - lo1) * j / double(m - 1));
  // compass search from the best coarse sample
  double step = cap / double(m);
  while (step > 1e-13) {
    bool improved = false;
    static const int dx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    static const int dy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    for (int k = 0; k < 8; ++k) {
      double y0 = by0 + step * dx[k], y1 = by1 + step * dy[k];
      if (y0 * y0 + y1 * y1 > radius_ * radius_) continue;
      double v = dist2(y0, y1);
      if (v < best) { best = v; by0 = y0; by1 = y1; improved = true; }
    }
    if (!improved) step *= 0.5;
  }
  return std::sqrt(std::max(0.0, best));
}

double GraphDomain::graph_dist(const Vec3& x) const {
  if (graph_.profile() == Profile::Flat) return std::abs(x[dim_ - 1]);
  return dim_ == 2 ? graph_dist_1d(x) : graph_dist_2d(x);
}

double GraphDomain::surface_dist(const Vec3& x) const {
  double sphere = std::abs(radius_ - x.head(dim_).norm());
  return std::min(graph_dist(x), sphere);
}

double GraphDomain::boundary_dist(const Vec3& x) const {
  if (!contains(x)) throw contract_error("boundary_dist: point outside domain");
  if (graph_.profile() == Profile::Flat)
    return std::min(x[dim_ - 1], radius_ - x.head(dim_).norm());
  return surface_dist(x);
}

std::vector<Vec3> GraphDomain::boundary_points(int count) const {
  if (count < 1) throw input_error("boundary_points: count must be >= 1");
  std::vector<Vec3> pts;
  pts.reserve(count);
  if (dim_ == 2) {
    double half = radius_ / 2.0;
    for (int i = 0; i < count; ++i) {
      Vec3 p = Vec3::Zero();
      p[0] = -half + (2.0 * half) * (double(i) + 0.5) / double(count);
      p[1] = graph_.value(p, 1);
      pts.push_back(p);
    }
    return pts;
  }
  // n = 3: centered square lattice clipped to the disk B'_{R/2}, grown until
  // it holds `count` points, then the innermost `count` kept.
  double half = radius_ / 2.0;
  for (int m = 1;; ++m) {
    std::vector<Vec3> cand;
    double spacing = 2.0 * half / double(m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        double a = (double(i) + 0.5) * spacing - half;
        double b = (double(j) + 0.5) * spacing - half;
        if (a * a + b * b > half * half) continue;
        Vec3 p = Vec3::Zero();
        p[0] = a; p[1] = b;
        p[2] = graph_.value(p, 2);
        cand.push_back(p);
      }
    }
    if (int(cand.size()) >= count) {
      std::stable_sort(cand.begin(), cand.end(), [](const Vec3& u, const Vec3& v) {
        double ru = u[0] * u[0] + u[1] * u[1], rv = v[0] * v[0] + v[1] * v[1];
        if (ru != rv) return ru < rv;
        if (u[0] != v[0]) return u[0] < v[0];
        return u[1] < v[1];
      });
      cand.resize(count);
      return cand;
    }
  }
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a >= b) return 0.0;
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

namespace {

// length of the vertical section {x_n : x_n > phi(x'), |x| < R} shifted by s0
double section_length(const HolderGraph& g, double R, const Vec3& xp, int m,
                      double shift) {
  double r2 = xp.head(m).squaredNorm();
  if (r2 >= R * R) return 0.0;
  double top = std::sqrt(R * R - r2);
  double bottom = std::max(g.value(xp, m) + shift, -top);
  return std::max(0.0, top - bottom);
}

}  // namespace

double GraphDomain::measure(double tol) const {
  const int m = dim_ - 1;
  if (dim_ == 2) {
    auto f = [&](double t) {
      Vec3 p = Vec3::Zero();
      p[0] = t;
      return section_length(graph_, radius_, p, m, 0.0);
    };
    return adaptive_simpson(f, -radius_, radius_, tol);
  }
  auto outer = [&](double a) {
    auto inner = [&](double b) {
      Vec3 p = Vec3::Zero();
      p[0] = a; p[1] = b;
      return section_length(graph_, radius_, p, m, 0.0);
    };
    return adaptive_simpson(inner, -radius_, radius_, tol * 10.0, 24);
  };
  return adaptive_simpson(outer, -radius_, radius_, tol * 10.0, 24);
}

double GraphDomain::band_measure_upper(double t) const {
  if (t <= 0.0) return 0.0;
  double K = graph_.lipschitz_bound();
  double shift = t * std::sqrt(1.0 + K * K);
  double Rin = std::max(0.0, radius_ - t);
  const int m = dim_ - 1;
  double core;
  if (dim_ == 2) {
    auto f = [&](double s) {
      Vec3 p = Vec3::Zero();
      p[0] = s;
      return section_length(graph_, Rin, p, m, shift);
    };
    core = adaptive_simpson(f, -Rin, Rin, 1e-11);
  } else {
    auto outer = [&](double a) {
      auto inner = [&](double b) {
        Vec3 p = Vec3::Zero();
        p[0] = a; p[1] = b;
        return section_length(graph_, Rin, p, m, shift);
      };
      return adaptive_simpson(inner, -Rin, Rin, 1e-9, 24);
    };
    core = adaptive_simpson(outer, -Rin, Rin, 1e-9, 24);
  }
  // {dist > t} contains the shrunk core, so the band is at most the
  // difference (plus a small quadrature allowance).
  return std::max(0.0, measure() - core) + 1e-9;
}

}  // namespace w2d
