#include <doctest.h>

#include "w2d/manufactured.hpp"
#include "w2d/membership.hpp"
#include "w2d/solver.hpp"

#include <cmath>

using namespace w2d;

namespace {

std::shared_ptr<const GraphDomain> flat2() {
  return std::make_shared<GraphDomain>(HolderGraph::flat(), 1.0, 2);
}
std::shared_ptr<const GraphDomain> sin2() {
  return std::make_shared<GraphDomain>(HolderGraph::sinusoid(0.1, 4.0), 1.0, 2);
}

}  // namespace

TEST_CASE("grid: arms, uniform stencils, refinement persistence") {
  auto dom = sin2();
  double h = 1.0 / 24.0;
  auto grid = CutCellGrid::build(dom, h);
  REQUIRE(grid->n_interior() > 200);
  for (int i = 0; i < grid->n_interior(); ++i) {
    for (int dir = 0; dir < 4; ++dir) {
      const auto& arm = grid->arm(i, dir);
      CHECK(arm.len > 0.0);
      CHECK(arm.len <= h + 1e-15);
      if (arm.to_boundary) {
        const Vec3& bp = grid->boundary_pos(arm.neighbor);
        CHECK(dom->surface_dist(bp) <= 1e-8 * h);
      }
    }
  }
  // halved grid contains every coarse node
  auto fine = CutCellGrid::build(dom, h / 2.0);
  for (int i = 0; i < grid->n_interior(); ++i) {
    const auto& ix = grid->lattice_index(i);
    CHECK(fine->interior_at({2 * ix[0], 2 * ix[1], 0}) >= 0);
  }
}

TEST_CASE("sample: power barrier closed forms at a hand point") {
  auto grid = CutCellGrid::build(flat2(), 1.0 / 16.0);
  auto ms = ManufacturedSolution::power_barrier(2, 0.5);
  Vec3 p;
  p << 0.0, 0.25, 0.0;
  CHECK(ms.u(p) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(ms.f(p) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(ms.singular_at(Vec3::Zero()));
  auto s = sample(ms, grid);
  CHECK(s.flagged_nodes.empty());  // interior lattice nodes avoid x_n = 0
  // g is the trace of u on boundary nodes
  for (int b = 0; b < grid->n_boundary(); ++b)
    CHECK(s.g[b] == ms.u(grid->boundary_pos(b)));
}

TEST_CASE("manufactured membership inequality holds in closed form") {
  SplitMix64 rng(31);
  for (const char* name : {"quadratic", "smooth-bump", "anisotropic"}) {
    auto ms = ManufacturedSolution::by_name(name, 2);
    Ellipticity e(ms.lambda(), ms.Lambda());
    for (int rep = 0; rep < 1000; ++rep) {
      Vec3 x = Vec3::Zero();
      x[0] = rng.uniform(-0.7, 0.7);
      x[1] = rng.uniform(0.0, 0.7);
      Eigen::Matrix2d H = ms.hess(x).topLeftCorner(2, 2);
      double f = ms.f(x);
      CHECK(pucci_minus(H, e) <= f + 1e-11);
      CHECK(pucci_plus(H, e) >= f - 1e-11);
    }
  }
}

TEST_CASE("solve_linear: exact on quadratic data") {
  auto grid = CutCellGrid::build(flat2(), 1.0 / 32.0);
  auto coeffs = DiagonalCoefficients::constant({1.0, 1.0});
  SolveOptions opts;
  SolveInfo info;
  auto u = solve_linear(grid, coeffs, [](const Vec3&) { return 4.0; },
                        [](const Vec3& x) { return x[0] * x[0] + x[1] * x[1]; },
                        Ellipticity(1.0, 1.0), opts, &info);
  double worst = 0.0;
  for (int i = 0; i < grid->n_interior(); ++i) {
    const Vec3& p = grid->interior_pos(i);
    worst = std::max(worst, std::abs(u.interior[i] - (p[0] * p[0] + p[1] * p[1])));
  }
  CHECK(worst <= 1e-10);
  CHECK(info.iterations > 0);
}

TEST_CASE("solve_linear: constants") {
  auto grid = CutCellGrid::build(sin2(), 1.0 / 24.0);
  auto coeffs = DiagonalCoefficients::constant({1.0, 1.0});
  auto u = solve_linear(grid, coeffs, [](const Vec3&) { return 0.0; },
                        [](const Vec3&) { return 1.0; }, Ellipticity(1.0, 1.0));
  for (int i = 0; i < grid->n_interior(); ++i)
    CHECK(u.interior[i] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("solve_linear: second-order convergence on manufactured data") {
  auto ms = ManufacturedSolution::anisotropic(2);
  auto coeffs = DiagonalCoefficients::constant(ms.coefficients());
  Ellipticity e(ms.lambda(), ms.Lambda());
  std::vector<double> errs;
  for (double h : {1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0}) {
    auto grid = CutCellGrid::build(flat2(), h);
    auto u = solve_linear(grid, coeffs, [&](const Vec3& x) { return ms.f(x); },
                          [&](const Vec3& x) { return ms.u(x); }, e);
    double worst = 0.0;
    for (int i = 0; i < grid->n_interior(); ++i)
      worst = std::max(worst, std::abs(u.interior[i] - ms.u(grid->interior_pos(i))));
    errs.push_back(worst);
  }
  double r1 = std::log2(errs[0] / errs[1]);
  double r2 = std::log2(errs[1] / errs[2]);
  CHECK(std::abs(r1 - 2.0) <= 0.4);
  CHECK(std::abs(r2 - 2.0) <= 0.4);
}

TEST_CASE("solve_linear: maximum principle and comparison principle") {
  auto grid = CutCellGrid::build(sin2(), 1.0 / 24.0);
  Ellipticity e(0.5, 3.0);
  SplitMix64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    double a1 = rng.uniform(0.5, 3.0), a2 = rng.uniform(0.5, 3.0);
    auto coeffs = DiagonalCoefficients::constant({a1, a2});
    double c1 = rng.uniform(0.2, 2.0), c2 = rng.uniform(0.0, 1.0);
    double w1 = rng.uniform(0.5, 2.0), w2 = rng.uniform(0.5, 2.0);
    auto f1 = [&](const Vec3& x) { return -c1 - c2 * std::sin(w1 * x[0]) * 0.3 - 0.3; };
    auto f2 = [&](const Vec3& x) { return f1(x) + 0.5 + 0.2 * std::cos(w2 * x[1]); };
    auto g1 = [&](const Vec3& x) { return 1.0 + 0.3 * std::sin(w1 * x[0]); };
    auto g2 = [&](const Vec3& x) { return g1(x) - 0.4 - 0.1 * std::cos(x[1]); };
    auto u1 = solve_linear(grid, coeffs, f1, g1, e);  // f1 <= f2, g1 >= g2
    auto u2 = solve_linear(grid, coeffs, f2, g2, e);
    for (int i = 0; i < grid->n_interior(); ++i)
      CHECK(u1.interior[i] >= u2.interior[i] - 1e-8);
    // f1 <= 0: min u >= min g (checked internally too; assert explicitly)
    double min_u = u1.interior.minCoeff();
    double min_g = 1e300;
    for (int b = 0; b < grid->n_boundary(); ++b)
      min_g = std::min(min_g, g1(grid->boundary_pos(b)));
    CHECK(min_u >= min_g - 1e-8);
  }
}

TEST_CASE("solve_linear: input validation and non-convergence reporting") {
  auto grid = CutCellGrid::build(flat2(), 1.0 / 16.0);
  Ellipticity e(1.0, 2.0);
  auto bad = DiagonalCoefficients::constant({0.5, 1.0});  // below lambda
  CHECK_THROWS_AS(solve_linear(grid, bad, [](const Vec3&) { return 0.0; },
                               [](const Vec3&) { return 0.0; }, e),
                  input_error);
  auto coeffs = DiagonalCoefficients::constant({1.0, 1.0});
  SolveOptions opts;
  opts.tol = 1e-13;
  opts.max_iterations = 3;
  try {
    solve_linear(grid, coeffs, [](const Vec3&) { return 4.0; },
                 [](const Vec3&) { return 0.0; }, e, opts);
    FAIL("expected solver_error");
  } catch (const solver_error& err) {
    CHECK(std::string(err.what()).find("residual history") != std::string::npos);
  }
  Eigen::VectorXd wrong(3);
  wrong.setZero();
  GridFunction f = GridFunction::zeros(grid);
  CHECK_THROWS_AS(solve_linear(grid, coeffs, f, wrong, e), input_error);
}

TEST_CASE("n = 3: grid, solve, membership end to end") {
  auto dom = std::make_shared<GraphDomain>(HolderGraph::sinusoid(0.05, 3.0), 1.0, 3);
  auto grid = CutCellGrid::build(dom, 1.0 / 12.0);
  REQUIRE(grid->n_interior() > 300);
  for (int i = 0; i < grid->n_interior(); ++i)
    for (int dir = 0; dir < 6; ++dir) {
      CHECK(grid->arm(i, dir).len > 0.0);
      CHECK(grid->arm(i, dir).len <= grid->h() + 1e-15);
    }
  auto coeffs = DiagonalCoefficients::constant({1.0, 2.0, 1.5});
  Ellipticity e(1.0, 2.0);
  // quadratic data: u = |x|^2, sum a_i d_ii u = 2 (1 + 2 + 1.5) = 9
  auto u = solve_linear(grid, coeffs, [](const Vec3&) { return 9.0; },
                        [](const Vec3& x) { return x.squaredNorm(); }, e);
  double worst = 0.0;
  for (int i = 0; i < grid->n_interior(); ++i)
    worst = std::max(worst,
                     std::abs(u.interior[i] - grid->interior_pos(i).squaredNorm()));
  CHECK(worst <= 1e-9);
  GridFunction f = GridFunction::zeros(grid);
  f.interior.setConstant(9.0);
  auto rep = in_S_discrete(u, f, e, {1e-9, 0.0});
  CHECK(rep.judged > 50);
  CHECK(rep.fraction == 1.0);
}
