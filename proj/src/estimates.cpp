#include "w2d/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace w2d {

bool QuasiNormSpec::admissible(int dim, std::string* why) const {
  std::ostringstream os;
  bool ok = true;
  double lim = std::min({alpha, alpha_bar, 1.0 - double(dim) / p});
  if (!(alpha0 < lim)) {
    ok = false;
    os << "alpha0 >= min{alpha, alpha_bar, 1 - n/p} = " << lim << "; ";
  }
  if (!(delta <= delta0)) {
    ok = false;
    os << "delta > delta0; ";
  }
  if (!(delta < 1.0 / (1.0 - alpha0))) {
    ok = false;
    os << "delta >= 1/(1-alpha0); ";
  }
  if (why) *why = os.str();
  return ok;
}

namespace {

// visit interior nodes with lattice positions inside [lo, hi]
template <typename F>
void for_nodes_in_box(const CutCellGrid& G, const Vec3& lo, const Vec3& hi, F&& f) {
  const int n = G.dim();
  const double h = G.h();
  std::array<int, 3> ilo{0, 0, 0}, ihi{0, 0, 0};
  for (int d = 0; d < n; ++d) {
    ilo[d] = int(std::ceil(lo[d] / h - 1e-12));
    ihi[d] = int(std::floor(hi[d] / h + 1e-12));
  }
  std::array<int, 3> c = ilo;
  if (n == 2) {
    for (c[0] = ilo[0]; c[0] <= ihi[0]; ++c[0])
      for (c[1] = ilo[1]; c[1] <= ihi[1]; ++c[1]) {
        int id = G.interior_at(c);
        if (id >= 0) f(id);
      }
  } else {
    for (c[0] = ilo[0]; c[0] <= ihi[0]; ++c[0])
      for (c[1] = ilo[1]; c[1] <= ihi[1]; ++c[1])
        for (c[2] = ilo[2]; c[2] <= ihi[2]; ++c[2]) {
          int id = G.interior_at(c);
          if (id >= 0) f(id);
        }
  }
}

struct LsqAffine {
  bool ok = false;
  AffineFit fit;
};

// least-squares affine fit of u over nodes (interior + boundary) in
// Omega ∩ B_r(x0)
LsqAffine fit_affine(const GridFunction& u, const Vec3& x0, double r) {
  const CutCellGrid& G = *u.grid;
  const int n = G.dim();
  Eigen::MatrixXd AtA = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::VectorXd Atb = Eigen::VectorXd::Zero(n + 1);
  long count = 0;
  auto add = [&](const Vec3& p, double val) {
    Eigen::VectorXd row(n + 1);
    row[0] = 1.0;
    for (int d = 0; d < n; ++d) row[d + 1] = p[d] - x0[d];
    AtA.noalias() += row * row.transpose();
    Atb.noalias() += row * val;
    ++count;
  };
  Vec3 lo = x0 - Vec3::Constant(r), hi = x0 + Vec3::Constant(r);
  for (int d = n; d < 3; ++d) { lo[d] = 0.0; hi[d] = 0.0; }
  for_nodes_in_box(G, lo, hi, [&](int id) {
    const Vec3& p = G.interior_pos(id);
    if ((p - x0).norm() < r) add(p, u.interior[id]);
  });
  for (int b = 0; b < G.n_boundary(); ++b) {
    const Vec3& p = G.boundary_pos(b);
    if ((p - x0).norm() < r) add(p, u.boundary[b]);
  }
  LsqAffine out;
  if (count < n + 1) return out;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(AtA);
  if (ldlt.info() != Eigen::Success) return out;
  Eigen::VectorXd sol = ldlt.solve(Atb);
  if (!sol.allFinite()) return out;
  // reject numerically degenerate fits (all samples nearly collinear)
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(AtA);
  if (es.eigenvalues()[0] <= 1e-14 * es.eigenvalues()[n]) return out;
  out.ok = true;
  out.fit.value = sol[0];
  for (int d = 0; d < n; ++d) out.fit.gradient[d] = sol[d + 1];
  return out;
}

double sup_abs_diff_in_ball(const GridFunction& u, const AffineFit& l, const Vec3& x0,
                            double r) {
  const CutCellGrid& G = *u.grid;
  const int n = G.dim();
  double sup = 0.0;
  Vec3 lo = x0 - Vec3::Constant(r), hi = x0 + Vec3::Constant(r);
  for (int d = n; d < 3; ++d) { lo[d] = 0.0; hi[d] = 0.0; }
  for_nodes_in_box(G, lo, hi, [&](int id) {
    const Vec3& p = G.interior_pos(id);
    if ((p - x0).norm() < r)
      sup = std::max(sup, std::abs(u.interior[id] - l.eval(p, x0)));
  });
  for (int b = 0; b < G.n_boundary(); ++b) {
    const Vec3& p = G.boundary_pos(b);
    if ((p - x0).norm() < r)
      sup = std::max(sup, std::abs(u.boundary[b] - l.eval(p, x0)));
  }
  return sup;
}

}  // namespace

BoundaryFitResult holder_boundary_fit(const GridFunction& u, const Vec3& x0,
                                      const QuasiNormSpec& spec,
                                      const std::vector<double>& radii) {
  if (radii.empty()) throw input_error("holder_boundary_fit: no radii");
  const CutCellGrid& G = *u.grid;
  double rmin = *std::min_element(radii.begin(), radii.end());
  double rmax = *std::max_element(radii.begin(), radii.end());
  if (rmin < 4.0 * G.h() - 1e-12 || rmax > G.domain().radius() / 2.0 + 1e-12)
    throw input_error("holder_boundary_fit: radii outside resolved range [4h, R/2]");

  auto lsq = fit_affine(u, x0, rmin);
  if (!lsq.ok) throw input_error("holder_boundary_fit: degenerate fit region");

  BoundaryFitResult out;
  out.l = lsq.fit;
  out.grad_norm = lsq.fit.gradient.norm();
  for (double r : radii) {
    double sup = sup_abs_diff_in_ball(u, lsq.fit, x0, r);
    double c = sup / std::pow(r, 1.0 + spec.alpha0);
    out.per_radius.emplace_back(r, c);
    out.C_fit = std::max(out.C_fit, c);
  }
  return out;
}

InteriorRatio interior_ratio(const GridFunction& u, const GridFunction& f,
                             const Vec3& center, double r, const QuasiNormSpec& spec) {
  const CutCellGrid& G = *u.grid;
  const int n = G.dim();
  if (r < 8.0 * G.h() - 1e-12)
    throw input_error("interior_ratio: ball below resolved scale (r >= 8h)");
  if (!G.domain().contains(center) || G.domain().surface_dist(center) <= r)
    throw input_error("interior_ratio: ball not inside the domain");

  auto H = discrete_hessian(u);
  BallRegion inner{center, r / 2.0}, outer{center, r};
  double num = quasi_norm(H, spec.delta0, inner) * std::pow(r, 2.0 - double(n) / spec.delta0);
  double den = sup_norm(u, outer) + r * lp_norm(f, double(n), outer);
  if (den <= 1e-300) return {0.0, true};
  return {num / den, false};
}

EstimateReport cube_chain_report(const GridFunction& u, const GridFunction& f,
                                 const Eigen::VectorXd& g, const WhitneyCover& cover,
                                 const QuasiNormSpec& spec, double quarter_radius) {
  const CutCellGrid& G = *u.grid;
  const GraphDomain& dom = G.domain();
  if (cover.domain().dim() != dom.dim() ||
      std::abs(cover.domain().radius() - dom.radius()) > 1e-12 ||
      cover.domain().graph().profile() != dom.graph().profile())
    throw input_error("cube_chain_report: cover and grid use different domains");
  const int n = dom.dim();
  const double h = G.h();

  EstimateReport rep;
  rep.spec = spec;
  rep.spec_admissible = spec.admissible(n, &rep.spec_note);

  rep.norm_u_inf = max_abs(u);
  rep.norm_f_lp = lp_norm(f, spec.p, AllRegion{});
  rep.norm_g_c1a = holder_norm_g(G, g, spec.alpha);
  rep.H = rep.norm_u_inf + rep.norm_f_lp + rep.norm_g_c1a;

  auto hess = discrete_hessian(u);
  auto boundary_samples = dom.boundary_points(n == 2 ? 512 : 1024);

  const double ex_aff = double(n) - (1.0 - spec.alpha0) * spec.delta;
  const double ex_f = double(n) - spec.delta * double(n) / spec.p;

  double max_density = 0.0;      // max |D2u|^delta over judged nodes
  double skipped_measure = 0.0;  // total |Q| of skipped cubes
  std::map<int, double> level_mass;

  for (int id = 0; id < int(cover.cubes().size()); ++id) {
    if (!cover.dilated_in_omega(id, quarter_radius)) continue;
    const DyadicCube& q = cover.cubes()[id].cube;
    CubeRecord rec;
    rec.cube_id = id;
    rec.level = q.level;
    rec.d = q.diam();
    if (rec.d < 8.0 * h) {
      rec.skipped = true;
      ++rep.skipped_cubes;
      skipped_measure += std::ldexp(1.0, -q.level * n);
      rep.cubes.push_back(rec);
      continue;
    }
    ++rep.judged_cubes;

    // (a) affine fit at the nearest boundary sample
    Vec3 center = q.center();
    const Vec3* yk = &boundary_samples[0];
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : boundary_samples) {
      double dd = (s - center).norm();
      if (dd < best) { best = dd; yk = &s; }
    }
    double r_fit = std::min(6.0 * rec.d, dom.radius() / 2.0);
    auto lsq = fit_affine(u, *yk, r_fit);

    DilatedCube dq{q};
    Vec3 dlo = dq.lower(), dhi = dq.upper();
    double sup_diff = 0.0, f_mass_p = 0.0;
    double mass_d = 0.0, mass_d0 = 0.0;
    const double cell = std::pow(h, n);
    for_nodes_in_box(G, dlo, dhi, [&](int nid) {
      const Vec3& p = G.interior_pos(nid);
      if (!dq.contains_point(p)) return;
      if (lsq.ok)
        sup_diff = std::max(sup_diff, std::abs(u.interior[nid] - lsq.fit.eval(p, *yk)));
      double fv = std::abs(f.interior[nid]);
      f_mass_p += std::pow(fv, spec.p) * cell;
      // half-open membership in the base cube for exactly-additive masses
      bool in_base = true;
      for (int d = 0; d < n; ++d) {
        double t = std::ldexp(p[d], q.level);
        if (t < double(q.corner[d]) || t >= double(q.corner[d] + 1)) { in_base = false; break; }
      }
      if (in_base && hess.valid[nid]) {
        double fro = hess.H[nid].norm();
        mass_d += std::pow(fro, spec.delta) * cell;
        mass_d0 += std::pow(fro, spec.delta0) * cell;
        max_density = std::max(max_density, std::pow(fro, spec.delta));
      }
    });

    rec.hess_mass = mass_d;
    if (rep.H > 0.0 && lsq.ok)
      rec.c_aff = sup_diff / (std::pow(rec.d, 1.0 + spec.alpha0) * rep.H);
    double bound = std::pow(rec.d, ex_aff) * std::pow(rep.H, spec.delta) +
                   std::pow(rec.d, ex_f) * std::pow(f_mass_p, spec.delta / spec.p);
    rec.c_hess = bound > 0.0 ? mass_d / bound : 0.0;

    // per-cube interior-estimate ratio (first display of the chain)
    double f_mass_n = 0.0;
    for_nodes_in_box(G, dlo, dhi, [&](int nid) {
      const Vec3& p = G.interior_pos(nid);
      if (dq.contains_point(p))
        f_mass_n += std::pow(std::abs(f.interior[nid]), double(n)) * cell;
    });
    double den_ir = std::pow(rec.d, double(n) - 2.0 * spec.delta0) *
                        std::pow(sup_diff, spec.delta0) +
                    std::pow(rec.d, double(n) - spec.delta0) *
                        std::pow(f_mass_n, spec.delta0 / double(n));
    rec.interior_ratio = den_ir > 0.0 ? mass_d0 / den_ir : 0.0;

    rep.sum_mass += mass_d;
    level_mass[q.level] += mass_d;
    rep.max_c_aff = std::max(rep.max_c_aff, rec.c_aff);
    rep.max_c_hess = std::max(rep.max_c_hess, rec.c_hess);
    rep.cubes.push_back(rec);
  }

  rep.skipped_mass_bound = skipped_measure * max_density;

  // dyadic sums of the two chain exponents; sharpness probes can push an
  // exponent to zero or below, which the public dyadic_sum contract excludes
  auto exponent_sum = [&](double q) {
    double total = 0.0;
    for (const auto& layer : layers(cover, quarter_radius)) {
      if (layer.cube_ids.empty()) continue;
      double d = std::ldexp(std::sqrt(double(n)), -layer.s);
      total += double(layer.cube_ids.size()) * std::pow(d, q);
    }
    return total;
  };
  rep.rhs_aggregate = std::pow(rep.H, spec.delta) * exponent_sum(ex_aff) +
                      std::pow(rep.norm_f_lp, spec.delta) * exponent_sum(ex_f);
  rep.global_ratio = rep.rhs_aggregate > 0.0 ? rep.sum_mass / rep.rhs_aggregate : 0.0;

  for (const auto& [lvl, m] : level_mass) rep.level_mass.emplace_back(lvl, m);
  if (rep.level_mass.size() >= 2) {
    auto fit = [](const std::vector<std::pair<double, double>>& xy) {
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (auto [x, y] : xy) { sx += x; sy += y; sxx += x * x; sxy += x * y; }
      double m = double(xy.size());
      return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    std::vector<std::pair<double, double>> raw, density;
    for (const auto& [lvl, mass] : rep.level_mass) {
      if (mass <= 0.0) continue;
      raw.emplace_back(double(lvl), std::log2(mass));
      double lm = 0.0;  // judged-layer measure at this level
      for (const auto& rec : rep.cubes)
        if (!rec.skipped && rec.level == lvl) lm += std::ldexp(1.0, -lvl * n);
      if (lm > 0.0) density.emplace_back(double(lvl), std::log2(mass / lm));
    }
    if (raw.size() >= 2) rep.level_mass_slope = fit(raw);
    if (density.size() >= 2) {
      rep.level_density_slope = fit(density);
      rep.divergence_flag = rep.level_density_slope >= 1.0;
    }
  }
  return rep;
}

double theorem_ratio(const GridFunction& u, const GridFunction& f,
                     const Eigen::VectorXd& g, const QuasiNormSpec& spec,
                     double inner_radius, const Vec3& center,
                     TheoremBreakdown* breakdown) {
  const CutCellGrid& G = *u.grid;
  double H = max_abs(u) + lp_norm(f, spec.p, AllRegion{}) +
             holder_norm_g(G, g, spec.alpha);
  if (H <= 0.0) {
    if (breakdown) *breakdown = {};
    return 0.0;
  }
  auto du = discrete_gradient(u);
  auto d2u = discrete_hessian(u);
  BallRegion ball{center, inner_radius};
  TheoremBreakdown b;
  b.H = H;
  b.norm_u = quasi_norm(u, spec.delta, ball);
  b.norm_du = quasi_norm(du, spec.delta, ball);
  b.norm_d2u = quasi_norm(d2u, spec.delta, ball);
  if (breakdown) *breakdown = b;
  return (b.norm_u + b.norm_du + b.norm_d2u) / H;
}

PatchResult global_patch(const GridFunction& u, const GridFunction& f,
                         const Eigen::VectorXd& g, const QuasiNormSpec& spec,
                         const std::vector<Chart>& charts, double t_extent,
                         double omega_prime_radius, int coverage_samples,
                         std::uint64_t seed) {
  if (charts.empty()) throw input_error("global_patch: no charts");
  const CutCellGrid& G = *u.grid;
  const GraphDomain& dom = G.domain();
  const int n = dom.dim();

  // coverage of T = graph part with |x'| <= t_extent by the balls B_{r/12}
  std::vector<Vec3> uncovered;
  SplitMix64 rng(seed);
  for (int s = 0; s < coverage_samples; ++s) {
    Vec3 p = Vec3::Zero();
    if (n == 2) {
      p[0] = (s < 2) ? (s == 0 ? -t_extent : t_extent)
                     : rng.uniform(-t_extent, t_extent);
    } else {
      do {
        p[0] = rng.uniform(-t_extent, t_extent);
        p[1] = rng.uniform(-t_extent, t_extent);
      } while (p.head(2).norm() > t_extent);
    }
    p[n - 1] = dom.graph().value(p, n - 1);
    bool covered = false;
    for (const auto& c : charts)
      if ((p - c.center).norm() < c.r / 12.0) { covered = true; break; }
    if (!covered) uncovered.push_back(p);
  }
  if (!uncovered.empty()) {
    std::ostringstream os;
    os << "global_patch: cover gap, " << uncovered.size() << " of "
       << coverage_samples << " boundary samples uncovered; first at (";
    os << uncovered[0][0] << ", " << uncovered[0][1];
    if (n == 3) os << ", " << uncovered[0][2];
    os << ")";
    throw input_error(os.str());
  }

  auto du = discrete_gradient(u);
  auto d2u = discrete_hessian(u);

  PatchResult out;
  out.coverage_samples = coverage_samples;
  for (const auto& c : charts) {
    BallRegion inner{c.center, c.r / 12.0}, outer{c.center, c.r};
    double Hl = sup_norm(u, outer) + lp_norm(f, spec.p, outer) +
                holder_norm_g(G, g, spec.alpha, outer);
    ChartResult cr;
    cr.chart = c;
    cr.H_local = Hl;
    if (Hl > 0.0)
      cr.local_ratio = (quasi_norm(u, spec.delta, inner) +
                        quasi_norm(du, spec.delta, inner) +
                        quasi_norm(d2u, spec.delta, inner)) /
                       Hl;
    out.charts.push_back(cr);
    out.global_ratio = std::max(out.global_ratio, cr.local_ratio);
  }

  // interior leftover: inside B_omega_prime, away from every chart core and
  // from the boundary
  double rho0 = std::numeric_limits<double>::infinity();
  for (const auto& c : charts) rho0 = std::min(rho0, c.r / 48.0);
  PredicateRegion leftover{[&, rho0](const Vec3& x) {
    if (x.head(n).norm() >= omega_prime_radius) return false;
    for (const auto& c : charts)
      if ((x - c.center).norm() < c.r / 24.0) return false;
    return dom.dist_lower_bound(x) > rho0;
  }};
  double Hg = max_abs(u) + lp_norm(f, spec.p, AllRegion{});
  if (Hg > 0.0) {
    try {
      out.interior_ratio = (quasi_norm(u, spec.delta, leftover) +
                            quasi_norm(du, spec.delta, leftover) +
                            quasi_norm(d2u, spec.delta, leftover)) /
                           Hg;
    } catch (const input_error&) {
      out.interior_ratio = 0.0;  // leftover region resolved by the charts alone
    }
  }
  out.global_ratio = std::max(out.global_ratio, out.interior_ratio);
  return out;
}

double barrier_mass_oracle(double alpha0, double delta, double rho, double cut) {
  const double A = alpha0 * (1.0 + alpha0);
  const double s = (1.0 - alpha0) * delta;
  auto integrand = [&](double x) {
    return std::pow(x, -s) * 2.0 * std::sqrt(std::max(0.0, rho * rho - x * x));
  };
  if (cut >= rho) return 0.0;
  // tolerance relative to the integral's scale; divergent exponents make the
  // integrand huge near the cut
  double scale = std::max(integrand(cut) * cut, integrand(0.5 * rho) * rho);
  return std::pow(A, delta) * adaptive_simpson(integrand, cut, rho, 1e-11 * scale, 34);
}

std::vector<SharpnessCell> sharpness_sweep(std::shared_ptr<const GraphDomain> domain,
                                           const std::vector<double>& h_list,
                                           const std::vector<double>& deltas,
                                           const std::vector<double>& alpha0s,
                                           double region_radius, double threshold) {
  if (domain->dim() != 2 || domain->graph().profile() != Profile::Flat)
    throw input_error("sharpness_sweep: flat n = 2 domains only");
  if (h_list.size() < 3)
    throw input_error("sharpness_sweep: need at least three grids");
  std::vector<double> hs = h_list;
  std::sort(hs.begin(), hs.end(), std::greater<>());

  struct Level {
    std::shared_ptr<const CutCellGrid> grid;
    std::vector<HessianField> hess;  // per alpha0
  };
  std::vector<Level> lv;
  for (double h : hs) {
    Level L;
    L.grid = CutCellGrid::build(domain, h);
    for (double a0 : alpha0s) {
      auto ms = ManufacturedSolution::power_barrier(2, a0);
      auto s = sample(ms, L.grid);
      L.hess.push_back(discrete_hessian(s.u));
    }
    lv.push_back(std::move(L));
  }

  BallRegion region{Vec3::Zero(), region_radius};
  std::vector<SharpnessCell> out;
  for (std::size_t ai = 0; ai < alpha0s.size(); ++ai) {
    for (double d : deltas) {
      SharpnessCell cell;
      cell.alpha0 = alpha0s[ai];
      cell.delta = d;
      cell.predicted_stable = d * (1.0 - alpha0s[ai]) < 1.0;
      std::vector<double> masses;
      for (auto& L : lv) masses.push_back(delta_mass(L.hess[ai], d, region));
      double m2 = masses[masses.size() - 2], m3 = masses.back();
      cell.mass_finest = m3;
      cell.last_rel_change = std::abs(m3 - m2) / std::max(m3, 1e-300);
      cell.stable = cell.last_rel_change <= threshold;
      double h_fine = hs.back();
      cell.oracle_mass = barrier_mass_oracle(cell.alpha0, d, region_radius, 1.5 * h_fine);
      cell.rel_err_vs_oracle =
          std::abs(cell.mass_finest - cell.oracle_mass) / std::max(cell.oracle_mass, 1e-300);
      out.push_back(cell);
    }
  }
  return out;
}

}  // namespace w2d
