// Reproducible experiment runner: every verification pipeline as a
// subcommand driven by one JSON config, emitting CSV/JSON plus a manifest.

#include "w2d/estimates.hpp"
#include "w2d/io.hpp"
#include "w2d/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

namespace w2d {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct RunContext {
  json config;
  fs::path out;
  std::uint64_t seed = 0;
  int threads = 1;
};

std::shared_ptr<const GraphDomain> domain_of(const RunContext& ctx) {
  if (!ctx.config.contains("domain")) throw config_error("config: missing \"domain\"");
  return domain_from_json(ctx.config.at("domain"));
}

QuasiNormSpec spec_of(const RunContext& ctx) {
  QuasiNormSpec s;
  if (!ctx.config.contains("spec")) return s;
  const json& j = ctx.config.at("spec");
  s.delta = j.value("delta", s.delta);
  s.delta0 = j.value("delta0", s.delta0);
  s.p = j.value("p", s.p);
  s.alpha = j.value("alpha", s.alpha);
  s.alpha0 = j.value("alpha0", s.alpha0);
  s.alpha_bar = j.value("alpha_bar", s.alpha_bar);
  s.lambda = j.value("lambda", s.lambda);
  s.Lambda = j.value("Lambda", s.Lambda);
  return s;
}

double grid_h(const RunContext& ctx) {
  if (!ctx.config.contains("grid") || !ctx.config.at("grid").contains("h"))
    throw config_error("config: missing \"grid.h\"");
  return ctx.config.at("grid").at("h").get<double>();
}

int s_max_of(const RunContext& ctx) {
  return ctx.config.contains("whitney")
             ? ctx.config.at("whitney").value("s_max", 10)
             : 10;
}

double quarter_of(const RunContext& ctx) {
  return ctx.config.contains("whitney")
             ? ctx.config.at("whitney").value("quarter_radius", 0.25)
             : 0.25;
}

// Solution source: closed-form manufactured family, or the linear solver fed
// with a manufactured family's f and boundary trace.
struct Solution {
  GridFunction u, f;
  Eigen::VectorXd g;
  std::string source;
  double lambda = 1.0, Lambda = 1.0;
  SolveInfo info;
};

Solution solution_of(const RunContext& ctx, std::shared_ptr<const CutCellGrid> grid) {
  if (!ctx.config.contains("solution"))
    throw config_error("config: missing \"solution\"");
  const json& j = ctx.config.at("solution");
  std::string type = j.value("type", "manufactured");
  std::string name = j.value("name", "quadratic");
  double a0 = j.value("alpha0", 0.5);
  auto ms = ManufacturedSolution::by_name(name, grid->dim(), a0);
  Solution out;
  out.lambda = ms.lambda();
  out.Lambda = ms.Lambda();
  if (type == "manufactured") {
    auto s = sample(ms, grid);
    out.u = std::move(s.u);
    out.f = std::move(s.f);
    out.g = std::move(s.g);
    out.source = "manufactured:" + name;
    return out;
  }
  if (type != "solve") throw config_error("solution.type must be manufactured|solve");
  std::vector<double> coeffs = ms.coefficients();
  if (j.contains("coeffs")) coeffs = j.at("coeffs").get<std::vector<double>>();
  double lam = *std::min_element(coeffs.begin(), coeffs.end());
  double Lam = *std::max_element(coeffs.begin(), coeffs.end());
  out.lambda = std::min(lam, ms.lambda());
  out.Lambda = std::max(Lam, ms.Lambda());
  Ellipticity ell(out.lambda, out.Lambda);
  auto dc = DiagonalCoefficients::constant(coeffs);
  out.u = solve_linear(grid, dc, [&](const Vec3& x) { return ms.f(x); },
                       [&](const Vec3& x) { return ms.u(x); }, ell, {}, &out.info);
  out.f = GridFunction::zeros(grid);
  for (int i = 0; i < grid->n_interior(); ++i)
    out.f.interior[i] = ms.f(grid->interior_pos(i));
  out.g = out.u.boundary;
  out.source = "solve:" + name;
  return out;
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream os(p);
  if (!os) throw config_error("cannot open " + p.string());
  os << j.dump(2) << '\n';
}

// --- subcommands -----------------------------------------------------------

int run_decompose(const RunContext& ctx) {
  auto dom = domain_of(ctx);
  auto cover = decompose(dom, s_max_of(ctx));
  double quarter = quarter_of(ctx);
  save_cover_csv(cover, ctx.out / "cover.csv", quarter);

  json audit;
  audit["cubes"] = cover.cubes().size();
  audit["residual_measure"] = cover.residual_measure();
  audit["covered_measure"] = cover.covered_measure();

  long iii_fail = 0;
  const double tol = 1e-8 * dom->radius();
  for (const auto& ci : cover.cubes()) {
    double d = ci.cube.diam();
    if (!(ci.dist_hi >= d - tol && ci.dist_lo <= 4.0 * d + tol)) ++iii_fail;
  }
  long anc_fail = 0;
  for (const auto& ci : cover.cubes()) {
    DyadicCube p = ci.cube;
    while (p.level > 0) {
      p = p.parent();
      if (cover.has_cube(p)) ++anc_fail;
    }
  }
  int samples = ctx.config.value("samples", 10000);
  SplitMix64 rng(ctx.seed);
  int max_overlap = 0;
  int tested = 0;
  while (tested < samples) {
    Vec3 x = Vec3::Zero();
    for (int d = 0; d < dom->dim(); ++d)
      x[d] = rng.uniform(-dom->radius(), dom->radius());
    if (!dom->contains(x)) continue;
    ++tested;
    max_overlap = std::max(max_overlap, overlap_count(cover, x));
  }
  audit["property_iii_failures"] = iii_fail;
  audit["ancestor_violations"] = anc_fail;
  audit["max_overlap"] = max_overlap;
  audit["overlap_bound"] = std::pow(12.0, dom->dim());
  audit["inclusion"] = verify_cover_inclusion(cover, dom->radius() / 12.0,
                                              quarter, samples, ctx.seed);
  bool ok = iii_fail == 0 && anc_fail == 0 &&
            max_overlap <= int(std::pow(12.0, dom->dim()));
  // replay verification against a previously exported cover
  if (ctx.config.contains("replay_cover")) {
    auto replay = load_cover_csv(dom, ctx.config.at("replay_cover").get<std::string>());
    bool match = replay.cubes().size() == cover.cubes().size();
    for (std::size_t i = 0; match && i < cover.cubes().size(); ++i)
      match = replay.cubes()[i].cube == cover.cubes()[i].cube;
    audit["replay_match"] = match;
    ok = ok && match;
  }
  write_json(ctx.out / "audit.json", audit);
  return ok ? 0 : 2;
}

int run_sums(const RunContext& ctx) {
  auto dom = domain_of(ctx);
  auto cover = decompose(dom, s_max_of(ctx));
  double quarter = quarter_of(ctx);
  std::vector<double> qs = {1.0, 1.25, 1.5, 2.0};
  if (ctx.config.contains("sums") && ctx.config.at("sums").contains("q"))
    qs = ctx.config.at("sums").at("q").get<std::vector<double>>();

  std::ofstream os(ctx.out / "sums.csv");
  os << "q,level,S,total,slope,convergent\n";
  json summary = json::array();
  for (double q : qs) {
    auto s = dyadic_sum(cover, q, quarter);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (auto [lvl, S] : s.per_level) {
      if (lvl < 5) continue;
      sx += lvl; sy += std::log2(S); sxx += double(lvl) * lvl;
      sxy += lvl * std::log2(S);
      ++m;
    }
    double slope = m >= 2 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    bool convergent = slope < -0.1;
    for (auto [lvl, S] : s.per_level)
      os << fmt_double(q) << ',' << lvl << ',' << fmt_double(S) << ','
         << fmt_double(s.total) << ',' << fmt_double(slope) << ','
         << (convergent ? 1 : 0) << '\n';
    summary.push_back({{"q", q},
                       {"total", s.total},
                       {"slope", slope},
                       {"convergent", convergent}});
  }
  write_json(ctx.out / "sums.json", summary);
  return 0;
}

int run_pucci_check(const RunContext& ctx) {
  long count = ctx.config.value("samples", 100000);
  double lambda = spec_of(ctx).lambda, Lambda = spec_of(ctx).Lambda;
  Ellipticity e(lambda, Lambda);
  Ellipticity wider(lambda / 2.0, Lambda * 1.5);
  SplitMix64 rng(ctx.seed);
  struct Worst {
    double duality = 0, homogeneity = 0, superadd = 0, monotone_ell = 0,
           monotone_mat = 0, order = 0;
  } w;
  for (long rep = 0; rep < count; ++rep) {
    int n = 2 + int(rng.next_u64() % 2);
    Eigen::MatrixXd M(n, n), N(n, n), P(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        M(i, j) = M(j, i) = rng.uniform(-1, 1);
        N(i, j) = N(j, i) = rng.uniform(-1, 1);
        P(i, j) = P(j, i) = rng.uniform(-1, 1);
      }
    double t = rng.uniform(0.0, 3.0);
    w.duality = std::max(w.duality, std::abs(pucci_minus(-M, e) + pucci_plus(M, e)));
    w.homogeneity = std::max(w.homogeneity,
                             std::abs(pucci_minus(t * M, e) - t * pucci_minus(M, e)));
    w.superadd = std::max(w.superadd, std::max(0.0, pucci_minus(M, e) + pucci_minus(N, e) -
                                                        pucci_minus(M + N, e)));
    w.monotone_ell = std::max(w.monotone_ell,
                              std::max(0.0, pucci_minus(M, wider) - pucci_minus(M, e)));
    Eigen::MatrixXd PSD = P * P.transpose();
    w.monotone_mat = std::max(w.monotone_mat,
                              std::max(0.0, pucci_minus(M, e) - pucci_minus(M + PSD, e)));
    w.order = std::max(w.order, std::max(0.0, pucci_minus(M, e) - pucci_plus(M, e)));
  }
  Eigen::Matrix2d id = Eigen::Matrix2d::Identity(), sg;
  sg << 1, 0, 0, -1;
  Ellipticity e12(1.0, 2.0);
  json out;
  out["samples"] = count;
  out["worst_duality"] = w.duality;
  out["worst_homogeneity"] = w.homogeneity;
  out["worst_superadditivity"] = w.superadd;
  out["worst_ellipticity_monotonicity"] = w.monotone_ell;
  out["worst_matrix_monotonicity"] = w.monotone_mat;
  out["worst_order"] = w.order;
  out["hand_identity_minus"] = pucci_minus(id, e12);
  out["hand_identity_plus"] = pucci_plus(id, e12);
  out["hand_split_minus"] = pucci_minus(sg, e12);
  out["hand_split_plus"] = pucci_plus(sg, e12);
  bool ok = w.duality < 1e-9 && w.homogeneity < 1e-9 && w.superadd < 1e-9 &&
            w.monotone_ell < 1e-9 && w.monotone_mat < 1e-9 && w.order < 1e-9 &&
            pucci_minus(id, e12) == 2.0 && pucci_plus(id, e12) == 4.0 &&
            pucci_minus(sg, e12) == -1.0 && pucci_plus(sg, e12) == 1.0;
  out["pass"] = ok;
  write_json(ctx.out / "pucci.json", out);
  return ok ? 0 : 2;
}

int run_solve(const RunContext& ctx) {
  auto dom = domain_of(ctx);
  auto grid = CutCellGrid::build(dom, grid_h(ctx));
  auto sol = solution_of(ctx, grid);
  save_grid_function(sol.u, ctx.out / "solution.csv", ctx.out / "solution.json",
                     sol.lambda, sol.Lambda);
  Ellipticity e(sol.lambda, sol.Lambda);
  MembershipOptions mo;
  mo.report_tol = ctx.config.value("report_tol", 1e-8);
  mo.truncation_allowance = ctx.config.value("truncation_allowance", 0.0);
  auto rep = in_S_discrete(sol.u, sol.f, e, mo);
  save_membership_csv(rep, *grid, ctx.out / "membership.csv");
  json out;
  out["source"] = sol.source;
  out["interior_nodes"] = grid->n_interior();
  out["boundary_nodes"] = grid->n_boundary();
  out["judged"] = rep.judged;
  out["fraction_pass"] = rep.fraction;
  out["tau"] = rep.tau;
  out["iterations"] = sol.info.iterations;
  out["residual"] = sol.info.residual;
  write_json(ctx.out / "solve.json", out);
  return rep.fraction >= 0.99 ? 0 : 2;
}

int run_boundary_fit(const RunContext& ctx) {
  auto dom = domain_of(ctx);
  auto grid = CutCellGrid::build(dom, grid_h(ctx));
  auto sol = solution_of(ctx, grid);
  QuasiNormSpec spec = spec_of(ctx);
  std::vector<double> radii = {1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0};
  if (ctx.config.contains("radii"))
    radii = ctx.config.at("radii").get<std::vector<double>>();
  Vec3 x0 = Vec3::Zero();
  if (ctx.config.contains("x0_param")) {
    x0[0] = ctx.config.at("x0_param").get<double>();
    x0[dom->dim() - 1] = dom->graph().value(x0, dom->dim() - 1);
  }
  auto fit = holder_boundary_fit(sol.u, x0, spec, radii);
  std::ofstream os(ctx.out / "fit.csv");
  os << "r,C\n";
  for (auto [r, c] : fit.per_radius)
    os << fmt_double(r) << ',' << fmt_double(c) << '\n';
  json out;
  out["C_fit"] = fit.C_fit;
  out["grad_norm"] = fit.grad_norm;
  double cmin = 1e300, cmax = 0.0;
  for (auto [r, c] : fit.per_radius) {
    cmin = std::min(cmin, c);
    cmax = std::max(cmax, c);
  }
  out["ratio_max_over_min"] = cmax / std::max(cmin, 1e-300);
  write_json(ctx.out / "fit.json", out);
  return 0;
}

int run_chain(const RunContext& ctx) {
  auto dom = domain_of(ctx);
  auto cover = decompose(dom, s_max_of(ctx));
  auto grid = CutCellGrid::build(dom, grid_h(ctx));
  auto sol = solution_of(ctx, grid);
  auto rep = cube_chain_report(sol.u, sol.f, sol.g, cover, spec_of(ctx), quarter_of(ctx));
  save_report_json(rep, ctx.out / "report.json");
  save_report_cubes_csv(rep, ctx.out / "cubes.csv");
  save_report_levels_csv(rep, ctx.out / "levels.csv");
  save_report_summary_csv(rep, ctx.out / "summary.csv");
  return 0;
}

int run_verify(const RunContext& ctx) {
  auto dom = domain_of(ctx);
  QuasiNormSpec spec = spec_of(ctx);
  double inner = ctx.config.value("inner_radius", dom->radius() / 12.0);
  std::vector<double> hs;
  if (ctx.config.contains("h_list"))
    hs = ctx.config.at("h_list").get<std::vector<double>>();
  else
    hs = {grid_h(ctx), grid_h(ctx) / 2.0, grid_h(ctx) / 4.0};

  std::ofstream os(ctx.out / "ratios.csv");
  os << "h,ratio,norm_u,norm_du,norm_d2u,H\n";
  std::vector<double> ratios;
  for (double h : hs) {
    auto grid = CutCellGrid::build(dom, h);
    RunContext sub = ctx;
    auto sol = solution_of(sub, grid);
    TheoremBreakdown b;
    double r = theorem_ratio(sol.u, sol.f, sol.g, spec, inner, Vec3::Zero(), &b);
    ratios.push_back(r);
    os << fmt_double(h) << ',' << fmt_double(r) << ',' << fmt_double(b.norm_u)
       << ',' << fmt_double(b.norm_du) << ',' << fmt_double(b.norm_d2u) << ','
       << fmt_double(b.H) << '\n';
  }
  double rmin = *std::min_element(ratios.begin(), ratios.end());
  double rmax = *std::max_element(ratios.begin(), ratios.end());
  json out;
  std::string why;
  out["spec_admissible"] = spec.admissible(dom->dim(), &why);
  if (!why.empty()) out["spec_note"] = why;
  out["ratios"] = ratios;
  out["spread"] = rmax / std::max(rmin, 1e-300);
  out["verdict"] = (rmax / std::max(rmin, 1e-300) <= 3.0) ? "stable" : "unstable";
  write_json(ctx.out / "verify.json", out);
  return 0;
}

int run_patch(const RunContext& ctx) {
  auto dom = domain_of(ctx);
  auto grid = CutCellGrid::build(dom, grid_h(ctx));
  auto sol = solution_of(ctx, grid);
  if (!ctx.config.contains("charts")) throw config_error("config: missing \"charts\"");
  std::vector<Chart> charts;
  for (const auto& cj : ctx.config.at("charts")) {
    Chart c;
    c.center[0] = cj.at("param").get<double>();
    c.center[dom->dim() - 1] = dom->graph().value(c.center, dom->dim() - 1);
    c.r = cj.at("r").get<double>();
    charts.push_back(c);
  }
  double t_extent = ctx.config.value("t_extent", 0.09);
  double omega_prime = ctx.config.value("omega_prime_radius", 0.5);
  int samples = ctx.config.value("samples", 10000);
  auto res = global_patch(sol.u, sol.f, sol.g, spec_of(ctx), charts, t_extent,
                          omega_prime, samples, ctx.seed);
  json out;
  out["global_ratio"] = res.global_ratio;
  out["interior_ratio"] = res.interior_ratio;
  json cj = json::array();
  for (const auto& c : res.charts)
    cj.push_back({{"param", c.chart.center[0]},
                  {"r", c.chart.r},
                  {"H_local", c.H_local},
                  {"local_ratio", c.local_ratio}});
  out["charts"] = cj;
  out["coverage_samples"] = res.coverage_samples;
  write_json(ctx.out / "patch.json", out);
  return 0;
}

int run_sharpness(const RunContext& ctx) {
  auto dom = domain_of(ctx);
  std::vector<double> hs = {1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0};
  std::vector<double> deltas = {0.3, 0.45, 0.6, 5.0, 7.0};
  std::vector<double> alpha0s = {0.3, 0.4, 0.5, 0.6, 0.7};
  if (ctx.config.contains("h_list"))
    hs = ctx.config.at("h_list").get<std::vector<double>>();
  if (ctx.config.contains("deltas"))
    deltas = ctx.config.at("deltas").get<std::vector<double>>();
  if (ctx.config.contains("alpha0s"))
    alpha0s = ctx.config.at("alpha0s").get<std::vector<double>>();
  double region = ctx.config.value("region_radius", 1.0 / 12.0);
  auto cells = sharpness_sweep(dom, hs, deltas, alpha0s, region);
  std::ofstream os(ctx.out / "sharpness.csv");
  os << "delta,alpha0,criterion,stable,predicted,mass,oracle,rel_err,last_change\n";
  bool all_match = true;
  for (const auto& c : cells) {
    os << fmt_double(c.delta) << ',' << fmt_double(c.alpha0) << ','
       << fmt_double(1.0 - c.delta * (1.0 - c.alpha0)) << ',' << (c.stable ? 1 : 0)
       << ',' << (c.predicted_stable ? 1 : 0) << ',' << fmt_double(c.mass_finest)
       << ',' << fmt_double(c.oracle_mass) << ',' << fmt_double(c.rel_err_vs_oracle)
       << ',' << fmt_double(c.last_rel_change) << '\n';
    all_match = all_match && (c.stable == c.predicted_stable);
  }
  json out;
  out["cells"] = cells.size();
  out["all_verdicts_match"] = all_match;
  write_json(ctx.out / "sharpness.json", out);
  return all_match ? 0 : 2;
}

int dispatch(const std::string& sub, RunContext& ctx) {
  fs::create_directories(ctx.out);
  auto t0 = Clock::now();
  int rc;
  if (sub == "decompose") rc = run_decompose(ctx);
  else if (sub == "sums") rc = run_sums(ctx);
  else if (sub == "pucci-check") rc = run_pucci_check(ctx);
  else if (sub == "solve") rc = run_solve(ctx);
  else if (sub == "boundary-fit") rc = run_boundary_fit(ctx);
  else if (sub == "chain") rc = run_chain(ctx);
  else if (sub == "verify") rc = run_verify(ctx);
  else if (sub == "patch") rc = run_patch(ctx);
  else if (sub == "sharpness") rc = run_sharpness(ctx);
  else throw config_error("unknown subcommand: " + sub);
  double wall = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(ctx.out, ctx.config, sub, wall);
  return rc;
}

}  // namespace
}  // namespace w2d

int main(int argc, char** argv) {
  CLI::App app{"boundary W2-delta estimate machinery: Whitney covers, Pucci "
               "operators, cut-cell solves, and estimate-chain reports"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "sampling seed (overrides config)");
  app.add_option("--threads", threads, "worker threads");

  for (const char* name :
       {"decompose", "sums", "pucci-check", "solve", "boundary-fit", "chain",
        "verify", "patch", "sharpness"})
    app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  seed_given = seed_opt->count() > 0;

  try {
    std::ifstream is(config_path);
    if (!is) throw w2d::config_error("cannot read config: " + config_path);
    w2d::RunContext ctx;
    is >> ctx.config;
    ctx.out = out_dir;
    ctx.seed = seed_given ? seed : ctx.config.value("seed", std::uint64_t(1));
    ctx.threads = threads;
    w2d::set_worker_threads(threads);
    std::string sub = app.get_subcommands().front()->get_name();
    int rc = w2d::dispatch(sub, ctx);
    if (rc == 0)
      std::cout << sub << ": ok, outputs in " << out_dir << "\n";
    else
      std::cout << sub << ": completed with failing checks (see " << out_dir << ")\n";
    return rc;
  } catch (const w2d::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
