#include <doctest.h>

#include "w2d/estimates.hpp"
#include "w2d/io.hpp"
#include "w2d/solver.hpp"

#include <cmath>
#include <filesystem>

using namespace w2d;

namespace {

std::shared_ptr<const GraphDomain> flat2(double R = 1.0) {
  return std::make_shared<GraphDomain>(HolderGraph::flat(), R, 2);
}

QuasiNormSpec unit_spec() {
  QuasiNormSpec s;
  s.delta = 1.0;
  s.delta0 = 1.0;
  s.p = 8.0;
  s.alpha = 1.0;
  s.alpha0 = 0.15;
  s.alpha_bar = 0.2;
  return s;
}

GridFunction fill(std::shared_ptr<const CutCellGrid> g,
                  const std::function<double(const Vec3&)>& fn) {
  GridFunction u = GridFunction::zeros(g);
  for (int i = 0; i < g->n_interior(); ++i) u.interior[i] = fn(g->interior_pos(i));
  for (int b = 0; b < g->n_boundary(); ++b) u.boundary[b] = fn(g->boundary_pos(b));
  return u;
}

}  // namespace

TEST_CASE("QuasiNormSpec admissibility flags") {
  QuasiNormSpec s = unit_spec();
  CHECK(s.admissible(2));
  s.alpha0 = 0.5;  // above alpha_bar = 0.2
  std::string why;
  CHECK_FALSE(s.admissible(2, &why));
  CHECK(why.find("alpha0") != std::string::npos);
  s = unit_spec();
  s.delta = 1.2;  // above 1/(1 - 0.15) = 1.176 and above delta0
  CHECK_FALSE(s.admissible(2));
  // exponent threshold equivalences: n - dn/p > n-1 iff d < p/n,
  // n - (1-a0)d > n-1 iff d < 1/(1-a0)
  for (double d : {0.3, 0.9, 1.4, 2.0})
    for (double p : {3.0, 8.0, 20.0})
      for (double a0 : {0.2, 0.5, 0.8}) {
        CHECK(((2.0 - d * 2.0 / p) > 1.0) == (d < p / 2.0));
        CHECK(((2.0 - (1.0 - a0) * d) > 1.0) == (d < 1.0 / (1.0 - a0)));
      }
}

TEST_CASE("discrete_hessian: exact on quadratics, second order on sin") {
  auto dom = flat2();
  auto grid = CutCellGrid::build(dom, 1.0 / 32.0);
  auto u_xy = fill(grid, [](const Vec3& x) { return x[0] * x[1]; });
  auto H = discrete_hessian(u_xy);
  long valid = 0;
  for (int i = 0; i < grid->n_interior(); ++i) {
    if (!H.valid[i]) continue;
    ++valid;
    CHECK(H.H[i](0, 1) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(H.H[i](0, 0) == doctest::Approx(0.0).epsilon(1e-11));
  }
  CHECK(valid > 500);

  auto u_q = fill(grid, [](const Vec3& x) { return x[0] * x[0]; });
  auto Hq = discrete_hessian(u_q);
  for (int i = 0; i < grid->n_interior(); ++i) {
    if (!Hq.valid[i]) continue;
    CHECK(Hq.H[i](0, 0) == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(Hq.H[i](1, 1) == doctest::Approx(0.0).epsilon(1e-10));
  }

  std::vector<double> errs;
  for (double h : {1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0}) {
    auto g = CutCellGrid::build(dom, h);
    auto u = fill(g, [](const Vec3& x) { return std::sin(x[0] + x[1]); });
    auto Hs = discrete_hessian(u);
    double worst = 0.0;
    for (int i = 0; i < g->n_interior(); ++i) {
      if (!Hs.valid[i]) continue;
      const Vec3& p = g->interior_pos(i);
      double exact = -std::sin(p[0] + p[1]);
      Eigen::Matrix2d E;
      E << exact, exact, exact, exact;
      worst = std::max(worst, (Hs.H[i].topLeftCorner(2, 2) - E).norm());
    }
    errs.push_back(worst);
  }
  CHECK(std::abs(std::log2(errs[0] / errs[1]) - 2.0) <= 0.2);
  CHECK(std::abs(std::log2(errs[1] / errs[2]) - 2.0) <= 0.2);
}

TEST_CASE("quasi_norm: constant field and region monotonicity") {
  auto grid = CutCellGrid::build(flat2(), 1.0 / 32.0);
  auto u = fill(grid, [](const Vec3&) { return 3.0; });
  for (double delta : {0.5, 1.0, 2.0}) {
    BallRegion ball{Vec3::Zero(), 0.5};
    long count = 0;
    for (int i = 0; i < grid->n_interior(); ++i)
      if ((grid->interior_pos(i) - ball.center).norm() < ball.r) ++count;
    double m = double(count) * grid->h() * grid->h();
    CHECK(quasi_norm(u, delta, ball) ==
          doctest::Approx(3.0 * std::pow(m, 1.0 / delta)).epsilon(1e-12));
  }
  // enlarging the region never decreases the quasi-norm
  double prev = 0.0;
  for (double r : {0.2, 0.3, 0.5, 0.8}) {
    double v = quasi_norm(u, 0.7, BallRegion{Vec3::Zero(), r});
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(quasi_norm(u, 0.5, BallRegion{Vec3::Zero(), 1e-9}), input_error);
  CHECK_THROWS_AS(quasi_norm(u, -1.0, BallRegion{Vec3::Zero(), 0.5}), input_error);
}

TEST_CASE("quasi_norm: power barrier against the antiderivative oracle") {
  auto dom = flat2();
  const double rho = 0.25;
  // convergent cell: delta (1 - alpha0) = 0.25 < 1
  {
    const double a0 = 0.5, delta = 0.5, h = 1.0 / 128.0;
    auto grid = CutCellGrid::build(dom, h);
    auto s = sample(ManufacturedSolution::power_barrier(2, a0), grid);
    auto H = discrete_hessian(s.u);
    double mass = delta_mass(H, delta, BallRegion{Vec3::Zero(), rho});
    double oracle = barrier_mass_oracle(a0, delta, rho, 1.5 * h);
    CHECK(std::abs(mass - oracle) / oracle <= 0.05);
  }
  // divergent cell: value grows like h^{(1-(1-a0)delta)/delta}
  {
    const double a0 = 0.5, delta = 5.0;
    std::vector<double> vals;
    for (double h : {1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0}) {
      auto grid = CutCellGrid::build(dom, h);
      auto s = sample(ManufacturedSolution::power_barrier(2, a0), grid);
      auto H = discrete_hessian(s.u);
      vals.push_back(quasi_norm(H, delta, BallRegion{Vec3::Zero(), rho}));
    }
    double expo = (1.0 - (1.0 - a0) * delta) / delta;  // = -0.3
    double s1 = std::log2(vals[1] / vals[0]), s2 = std::log2(vals[2] / vals[1]);
    CHECK(std::abs(s1 + expo) <= 0.1);  // value ~ h^expo, so ratio ~ 2^{-expo}
    CHECK(std::abs(s2 + expo) <= 0.1);
  }
}

TEST_CASE("per-cube Hessian masses add exactly over the family") {
  auto dom = flat2();
  auto cover = decompose(dom, 7);
  auto grid = CutCellGrid::build(dom, 1.0 / 64.0);
  auto s = sample(ManufacturedSolution::smooth_bump(2), grid);
  auto H = discrete_hessian(s.u);
  std::vector<int> family;
  for (int id = 0; id < int(cover.cubes().size()); ++id)
    if (cover.dilated_in_omega(id, 0.25)) family.push_back(id);
  REQUIRE(family.size() > 10);
  double whole = delta_mass(H, 0.7, CubeSetRegion{&cover, family});
  double parts = 0.0;
  for (int id : family)
    parts += delta_mass(H, 0.7, CubeSetRegion{&cover, {id}});
  CHECK(std::abs(whole - parts) <= 1e-12 * std::max(1.0, whole));
}

TEST_CASE("holder_norm_g: closed-form traces") {
  auto grid = CutCellGrid::build(flat2(), 1.0 / 64.0);
  Eigen::VectorXd zero = Eigen::VectorXd::Zero(grid->n_boundary());
  CHECK(holder_norm_g(*grid, zero, 0.5) == 0.0);

  // linear trace: Hölder seminorm vanishes up to finite differences
  Eigen::VectorXd lin(grid->n_boundary());
  for (int b = 0; b < grid->n_boundary(); ++b)
    lin[b] = 2.0 + 3.0 * grid->boundary_pos(b)[0];
  double norm_lin = holder_norm_g(*grid, lin, 0.5);
  double expected = 5.0 + 3.0;  // sup|g| on |x'|<=1 plus |Dg|
  CHECK(norm_lin == doctest::Approx(expected).epsilon(10.0 * grid->h()));

  // trace of x_n^{1+a0} on the flat boundary vanishes identically
  Eigen::VectorXd tr(grid->n_boundary());
  for (int b = 0; b < grid->n_boundary(); ++b)
    tr[b] = std::pow(std::max(0.0, grid->boundary_pos(b)[1]), 1.5);
  double norm_tr = holder_norm_g(*grid, tr, 0.5);
  CHECK(norm_tr <= 1e-10);

  Eigen::VectorXd bad(3);
  CHECK_THROWS_AS(holder_norm_g(*grid, bad, 0.5), input_error);
}

TEST_CASE("holder_boundary_fit: affine data and the power barrier") {
  auto dom = flat2();
  auto grid = CutCellGrid::build(dom, 1.0 / 128.0);
  QuasiNormSpec spec = unit_spec();

  auto aff = fill(grid, [](const Vec3& x) { return 0.3 + 0.7 * x[0] - 0.2 * x[1]; });
  std::vector<double> radii = {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0};
  auto fit = holder_boundary_fit(aff, Vec3::Zero(), spec, radii);
  CHECK(fit.C_fit <= 1e-8);
  CHECK(fit.grad_norm == doctest::Approx(std::hypot(0.7, 0.2)).epsilon(1e-6));

  spec.alpha0 = 0.5;
  auto ms = ManufacturedSolution::power_barrier(2, 0.5);
  auto s = sample(ms, grid);
  auto fitb = holder_boundary_fit(s.u, Vec3::Zero(), spec, radii);
  CHECK(fitb.C_fit <= 1.0 + 1e-6);
  CHECK(fitb.C_fit > 0.05);  // nondegenerate

  CHECK_THROWS_AS(holder_boundary_fit(aff, Vec3::Zero(), spec, {1e-4}), input_error);
  CHECK_THROWS_AS(holder_boundary_fit(aff, Vec3::Zero(), spec, {0.9}), input_error);
}

TEST_CASE("interior_ratio: stability, degeneracy, exact rescaling invariance") {
  auto dom = flat2();
  QuasiNormSpec spec = unit_spec();
  Vec3 c;
  c << 0.0, 0.5, 0.0;

  std::vector<double> vals;
  for (double h : {1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0}) {
    auto grid = CutCellGrid::build(dom, h);
    auto s = sample(ManufacturedSolution::quadratic(2), grid);
    vals.push_back(interior_ratio(s.u, s.f, c, 0.4, spec).value);
    CHECK(std::isfinite(vals.back()));
    CHECK(vals.back() > 0.0);
  }
  CHECK(std::abs(vals[1] - vals[0]) / vals[0] <= 0.02);
  CHECK(std::abs(vals[2] - vals[1]) / vals[1] <= 0.02);

  // 0/0 guarded
  auto grid = CutCellGrid::build(dom, 1.0 / 32.0);
  auto z = GridFunction::zeros(grid);
  auto r0 = interior_ratio(z, z, c, 0.3, spec);
  CHECK(r0.degenerate);
  CHECK(r0.value == 0.0);

  // ball outside the domain rejected
  Vec3 low;
  low << 0.0, 0.1, 0.0;
  CHECK_THROWS_AS(interior_ratio(z, z, low, 0.3, spec), input_error);

  // rescaling map x -> x / r with r = 1/4 reproduces the ratio exactly
  {
    const double h = 1.0 / 64.0, r = 0.25;
    auto g1 = CutCellGrid::build(dom, h);
    auto s1 = sample(ManufacturedSolution::quadratic(2), g1);
    double v1 = interior_ratio(s1.u, s1.f, c, r, spec).value;

    auto dom4 = flat2(4.0);
    auto g2 = CutCellGrid::build(dom4, h / r);
    GridFunction u2 = GridFunction::zeros(g2), f2 = GridFunction::zeros(g2);
    for (int i = 0; i < g2->n_interior(); ++i) {
      Vec3 y = g2->interior_pos(i);
      Vec3 x = y * r;
      u2.interior[i] = (x[0] * x[0] + x[1] * x[1]) / (r * r);
      f2.interior[i] = 4.0;
    }
    Vec3 c2 = c / r;
    double v2 = interior_ratio(u2, f2, c2, 1.0, spec).value;
    CHECK(v2 == doctest::Approx(v1).epsilon(1e-10));
  }
}

TEST_CASE("theorem_ratio: zero data, quadratic stability, scaling covariance") {
  auto dom = flat2();
  QuasiNormSpec spec = unit_spec();

  auto coarse = CutCellGrid::build(dom, 1.0 / 32.0);
  auto z = GridFunction::zeros(coarse);
  Eigen::VectorXd gz = Eigen::VectorXd::Zero(coarse->n_boundary());
  CHECK(theorem_ratio(z, z, gz, spec, 0.25) == 0.0);

  // O(h) boundary-strip drift: consecutive changes shrink ~2x and reach the
  // 3% band from h = 1/256
  std::vector<double> vals;
  for (double h : {1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0}) {
    auto grid = CutCellGrid::build(dom, h);
    auto s = sample(ManufacturedSolution::quadratic(2), grid);
    vals.push_back(theorem_ratio(s.u, s.f, s.g, spec, 0.25));
  }
  double d1 = std::abs(vals[1] - vals[0]) / vals[0];
  double d2 = std::abs(vals[2] - vals[1]) / vals[1];
  CHECK(d1 <= 0.05);
  CHECK(d2 <= 0.03);
  CHECK(d2 <= 0.75 * d1);

  // multiplying u, f, g by t leaves the ratio invariant to 1e-10
  auto grid = CutCellGrid::build(dom, 1.0 / 64.0);
  auto s = sample(ManufacturedSolution::quadratic(2), grid);
  double base = theorem_ratio(s.u, s.f, s.g, spec, 0.25);
  for (double t : {1e-3, 1e3}) {
    GridFunction ut = s.u, ft = s.f;
    ut.interior *= t; ut.boundary *= t;
    ft.interior *= t; ft.boundary *= t;
    Eigen::VectorXd gt = s.g * t;
    double scaled = theorem_ratio(ut, ft, gt, spec, 0.25);
    CHECK(std::abs(scaled - base) / base <= 1e-10);
  }
}

TEST_CASE("cube_chain_report: quadratic bounded; barrier dichotomy; scaling") {
  auto dom = flat2();
  QuasiNormSpec spec = unit_spec();
  auto cover = decompose(dom, 8);

  const double h = 1.0 / 128.0;
  auto grid = CutCellGrid::build(dom, h);
  auto sq = sample(ManufacturedSolution::quadratic(2), grid);
  auto rq = cube_chain_report(sq.u, sq.f, sq.g, cover, spec);
  CHECK(rq.spec_admissible);
  CHECK(rq.judged_cubes > 0);
  CHECK(std::isfinite(rq.max_c_aff));
  CHECK(std::isfinite(rq.max_c_hess));
  CHECK(rq.max_c_aff > 0.0);
  CHECK(rq.global_ratio > 0.0);
  CHECK_FALSE(rq.divergence_flag);

  // scaling u, f, g by t leaves every recorded ratio invariant
  GridFunction ut = sq.u, ft = sq.f;
  ut.interior *= 1e3; ut.boundary *= 1e3;
  ft.interior *= 1e3; ft.boundary *= 1e3;
  Eigen::VectorXd gt = sq.g * 1e3;
  auto rs = cube_chain_report(ut, ft, gt, cover, spec);
  CHECK(std::abs(rs.max_c_aff - rq.max_c_aff) / rq.max_c_aff <= 1e-10);
  CHECK(std::abs(rs.max_c_hess - rq.max_c_hess) / rq.max_c_hess <= 1e-10);
  CHECK(std::abs(rs.global_ratio - rq.global_ratio) / rq.global_ratio <= 1e-10);

  // barrier dichotomy on a grid fine enough to judge three cube levels
  {
    auto fine = CutCellGrid::build(dom, 1.0 / 512.0);
    auto sb = sample(ManufacturedSolution::power_barrier(2, 0.5), fine);
    auto cover10 = decompose(dom, 10);

    QuasiNormSpec bs = spec;
    bs.delta = 0.5;
    bs.delta0 = 0.6;
    bs.alpha0 = 0.5;  // sharpness probe: flagged, not rejected
    auto c8 = cube_chain_report(sb.u, sb.f, sb.g, cover, bs);
    auto c10 = cube_chain_report(sb.u, sb.f, sb.g, cover10, bs);
    CHECK(std::abs(c10.sum_mass - c8.sum_mass) / c10.sum_mass <= 0.05);
    CHECK_FALSE(c8.divergence_flag);
    // density slope tracks (1 - alpha0) delta = 0.25 in the convergent case
    CHECK(c8.level_density_slope == doctest::Approx(0.25).epsilon(0.5));
    REQUIRE(c8.level_mass.size() >= 3);

    QuasiNormSpec bd = spec;
    bd.delta = 5.0;
    bd.alpha0 = 0.5;
    auto cd = cube_chain_report(sb.u, sb.f, sb.g, cover, bd);
    CHECK(cd.divergence_flag);
    CHECK(cd.level_density_slope >= 1.0);
    CHECK(cd.level_mass_slope >= 0.0);
    CHECK_FALSE(cd.spec_admissible);
  }

  // report serialization smoke
  namespace fs = std::filesystem;
  auto dir = fs::temp_directory_path();
  save_report_json(rq, dir / "w2d_rep.json");
  save_report_cubes_csv(rq, dir / "w2d_cubes.csv");
  save_report_levels_csv(rq, dir / "w2d_levels.csv");
  CHECK(fs::file_size(dir / "w2d_rep.json") > 100);
  fs::remove(dir / "w2d_rep.json");
  fs::remove(dir / "w2d_cubes.csv");
  fs::remove(dir / "w2d_levels.csv");
}

TEST_CASE("global_patch: single chart equality, two charts, gap detection") {
  QuasiNormSpec spec = unit_spec();

  // flat domain, one chart at the origin covering T entirely
  {
    auto dom = flat2();
    auto grid = CutCellGrid::build(dom, 1.0 / 128.0);
    auto s = sample(ManufacturedSolution::smooth_bump(2), grid);
    Chart chart{Vec3::Zero(), 0.6};
    double t_extent = 0.04;  // T inside B_{r/12} = B_{0.05}
    auto res = global_patch(s.u, s.f, s.g, spec, {chart}, t_extent,
                            0.01, 2000, 99);
    double local = theorem_ratio(s.u, s.f, s.g, spec, chart.r / 12.0, chart.center);
    // interior leftover is empty at this omega' radius, so the global ratio
    // is the single local ratio, up to the chart-local H
    CHECK(res.charts.size() == 1);
    CHECK(res.global_ratio > 0.0);
    CHECK(res.charts[0].local_ratio == doctest::Approx(res.global_ratio));
    // numerators agree exactly: same inner ball, only the H's differ
    double full_H = max_abs(s.u) + lp_norm(s.f, spec.p, AllRegion{}) +
                    holder_norm_g(*grid, s.g, spec.alpha);
    CHECK(res.charts[0].local_ratio * res.charts[0].H_local ==
          doctest::Approx(local * full_H).epsilon(1e-9));
  }

  // sinusoid domain, two overlapping charts
  {
    auto dom = std::make_shared<GraphDomain>(HolderGraph::sinusoid(0.1, 4.0), 1.0, 2);
    auto grid = CutCellGrid::build(dom, 1.0 / 128.0);
    auto s = sample(ManufacturedSolution::smooth_bump(2), grid);
    Vec3 c1 = Vec3::Zero(), c2 = Vec3::Zero();
    c1[0] = -0.045; c1[1] = dom->graph().value(c1, 1);
    c2[0] = 0.045;  c2[1] = dom->graph().value(c2, 1);
    std::vector<Chart> charts = {{c1, 0.6}, {c2, 0.6}};
    auto res = global_patch(s.u, s.f, s.g, spec, charts, 0.09, 0.5, 5000, 3);
    CHECK(res.global_ratio > 0.0);
    CHECK(std::isfinite(res.global_ratio));
    CHECK(res.interior_ratio > 0.0);

    // deliberately undersized charts leave a gap around the origin
    std::vector<Chart> small = {{c1, 0.2}, {c2, 0.2}};
    CHECK_THROWS_AS(
        global_patch(s.u, s.f, s.g, spec, small, 0.09, 0.5, 5000, 3),
        input_error);
  }
}

TEST_CASE("sharpness detector: verdict matches the integrability criterion") {
  auto dom = flat2();
  std::vector<double> hs = {1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0};
  auto cells = sharpness_sweep(dom, hs, {0.5, 5.0}, {0.4, 0.6}, 1.0 / 12.0);
  REQUIRE(cells.size() == 4);
  for (const auto& c : cells) {
    CAPTURE(c.delta);
    CAPTURE(c.alpha0);
    CHECK(c.stable == c.predicted_stable);
    CHECK(c.predicted_stable == (c.delta * (1.0 - c.alpha0) < 1.0));
    if (c.predicted_stable) CHECK(c.rel_err_vs_oracle <= 0.05);
  }
}
