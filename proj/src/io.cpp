#include "w2d/io.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace w2d {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json domain_to_json(const GraphDomain& dom) {
  json j;
  j["profile"] = profile_name(dom.graph().profile());
  j["amplitude"] = dom.graph().amplitude();
  switch (dom.graph().profile()) {
    case Profile::Flat: break;
    case Profile::PowerCusp: j["alpha"] = dom.graph().frequency(); break;
    case Profile::Sinusoid: j["frequency"] = dom.graph().frequency(); break;
  }
  j["K"] = dom.graph().lipschitz_bound();
  j["R"] = dom.radius();
  j["dim"] = dom.dim();
  return j;
}

std::shared_ptr<const GraphDomain> domain_from_json(const json& j) {
  Profile p = profile_from_name(j.at("profile").get<std::string>());
  HolderGraph g = HolderGraph::flat();
  switch (p) {
    case Profile::Flat:
      break;
    case Profile::PowerCusp:
      g = HolderGraph::power_cusp(j.at("amplitude").get<double>(),
                                  j.at("alpha").get<double>());
      break;
    case Profile::Sinusoid:
      g = HolderGraph::sinusoid(j.at("amplitude").get<double>(),
                                j.at("frequency").get<double>());
      break;
  }
  double R = j.value("R", 1.0);
  int dim = j.value("dim", 2);
  return std::make_shared<GraphDomain>(g, R, dim);
}

void save_cover_csv(const WhitneyCover& cover, const std::filesystem::path& path,
                    double quarter_radius) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot open " + path.string());
  os << "level,c0,c1,c2,dist_lo,dist_hi,layer\n";
  for (int i = 0; i < int(cover.cubes().size()); ++i) {
    const auto& ci = cover.cubes()[i];
    int layer = cover.dilated_in_omega(i, quarter_radius) ? ci.cube.level : -1;
    os << ci.cube.level << ',' << ci.cube.corner[0] << ',' << ci.cube.corner[1] << ','
       << ci.cube.corner[2] << ',' << fmt_double(ci.dist_lo) << ','
       << fmt_double(ci.dist_hi) << ',' << layer << '\n';
  }
}

WhitneyCover load_cover_csv(std::shared_ptr<const GraphDomain> domain,
                            const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw config_error("cannot open " + path.string());
  std::string line;
  std::getline(is, line);  // header
  std::vector<WhitneyCover::CubeInfo> cubes;
  int s_max = 2;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    WhitneyCover::CubeInfo ci;
    int layer;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    ls >> ci.cube.level >> ci.cube.corner[0] >> ci.cube.corner[1] >> ci.cube.corner[2] >>
        ci.dist_lo >> ci.dist_hi >> layer;
    ci.cube.dim = domain->dim();
    s_max = std::max(s_max, ci.cube.level);
    cubes.push_back(ci);
  }
  return WhitneyCover::from_cubes(std::move(domain), s_max, std::move(cubes));
}

void save_grid_function(const GridFunction& u, const std::filesystem::path& csv_path,
                        const std::filesystem::path& sidecar_path, double lambda,
                        double Lambda) {
  std::ofstream os(csv_path);
  if (!os) throw config_error("cannot open " + csv_path.string());
  const CutCellGrid& G = *u.grid;
  const int n = G.dim();
  os << "kind,x0,x1,x2,value\n";
  for (int i = 0; i < G.n_interior(); ++i) {
    const Vec3& p = G.interior_pos(i);
    os << "i," << fmt_double(p[0]) << ',' << fmt_double(p[1]) << ','
       << fmt_double(n == 3 ? p[2] : 0.0) << ',' << fmt_double(u.interior[i]) << '\n';
  }
  for (int b = 0; b < G.n_boundary(); ++b) {
    const Vec3& p = G.boundary_pos(b);
    os << "b," << fmt_double(p[0]) << ',' << fmt_double(p[1]) << ','
       << fmt_double(n == 3 ? p[2] : 0.0) << ',' << fmt_double(u.boundary[b]) << '\n';
  }
  json side;
  side["h"] = G.h();
  side["domain"] = domain_to_json(G.domain());
  side["lambda"] = lambda;
  side["Lambda"] = Lambda;
  std::ofstream ss(sidecar_path);
  ss << side.dump(2) << '\n';
}

void save_membership_csv(const MembershipReport& rep, const CutCellGrid& grid,
                         const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot open " + path.string());
  os << "x0,x1,x2,minus_margin,plus_margin,pass\n";
  for (const auto& m : rep.nodes) {
    const Vec3& p = grid.interior_pos(m.node);
    os << fmt_double(p[0]) << ',' << fmt_double(p[1]) << ','
       << fmt_double(grid.dim() == 3 ? p[2] : 0.0) << ','
       << fmt_double(m.minus_margin) << ',' << fmt_double(m.plus_margin) << ','
       << (m.pass ? 1 : 0) << '\n';
  }
}

void save_report_json(const EstimateReport& rep, const std::filesystem::path& path) {
  json j;
  j["spec"] = {{"delta", rep.spec.delta},   {"delta0", rep.spec.delta0},
               {"p", rep.spec.p},           {"alpha", rep.spec.alpha},
               {"alpha0", rep.spec.alpha0}, {"alpha_bar", rep.spec.alpha_bar},
               {"lambda", rep.spec.lambda}, {"Lambda", rep.spec.Lambda}};
  j["spec_admissible"] = rep.spec_admissible;
  if (!rep.spec_note.empty()) j["spec_note"] = rep.spec_note;
  j["H"] = rep.H;
  j["norm_u_inf"] = rep.norm_u_inf;
  j["norm_f_lp"] = rep.norm_f_lp;
  j["norm_g_c1a"] = rep.norm_g_c1a;
  j["sum_mass"] = rep.sum_mass;
  j["rhs_aggregate"] = rep.rhs_aggregate;
  j["global_ratio"] = rep.global_ratio;
  j["max_c_aff"] = rep.max_c_aff;
  j["max_c_hess"] = rep.max_c_hess;
  j["judged_cubes"] = rep.judged_cubes;
  j["skipped_cubes"] = rep.skipped_cubes;
  j["skipped_mass_bound"] = rep.skipped_mass_bound;
  j["divergence_flag"] = rep.divergence_flag;
  j["level_mass_slope"] = rep.level_mass_slope;
  j["level_density_slope"] = rep.level_density_slope;
  std::ofstream os(path);
  if (!os) throw config_error("cannot open " + path.string());
  os << j.dump(2) << '\n';
}

void save_report_cubes_csv(const EstimateReport& rep, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot open " + path.string());
  os << "cube_id,level,d,skipped,c_aff,interior_ratio,hess_mass,c_hess\n";
  for (const auto& c : rep.cubes)
    os << c.cube_id << ',' << c.level << ',' << fmt_double(c.d) << ','
       << (c.skipped ? 1 : 0) << ',' << fmt_double(c.c_aff) << ','
       << fmt_double(c.interior_ratio) << ',' << fmt_double(c.hess_mass) << ','
       << fmt_double(c.c_hess) << '\n';
}

void save_report_levels_csv(const EstimateReport& rep, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot open " + path.string());
  os << "level,hess_mass\n";
  for (const auto& [lvl, m] : rep.level_mass)
    os << lvl << ',' << fmt_double(m) << '\n';
}

void save_report_summary_csv(const EstimateReport& rep, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw config_error("cannot open " + path.string());
  os << "quantity,value\n";
  auto row = [&](const char* k, double v) { os << k << ',' << fmt_double(v) << '\n'; };
  row("H", rep.H);
  row("norm_u_inf", rep.norm_u_inf);
  row("norm_f_lp", rep.norm_f_lp);
  row("norm_g_c1a", rep.norm_g_c1a);
  row("sum_mass", rep.sum_mass);
  row("rhs_aggregate", rep.rhs_aggregate);
  row("global_ratio", rep.global_ratio);
  row("max_c_aff", rep.max_c_aff);
  row("max_c_hess", rep.max_c_hess);
  row("judged_cubes", double(rep.judged_cubes));
  row("skipped_cubes", double(rep.skipped_cubes));
  row("skipped_mass_bound", rep.skipped_mass_bound);
  row("level_mass_slope", rep.level_mass_slope);
  row("level_density_slope", rep.level_density_slope);
  os << "divergence_flag," << (rep.divergence_flag ? 1 : 0) << '\n';
  os << "spec_admissible," << (rep.spec_admissible ? 1 : 0) << '\n';
}

std::uint64_t config_hash(const json& config) {
  std::string s = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_manifest(const std::filesystem::path& dir, const json& config,
                    const std::string& subcommand, double wall_seconds) {
  json m;
  m["subcommand"] = subcommand;
  m["version"] = kVersion;
  m["config_hash"] = config_hash(config);
  m["config"] = config;
  // the only run-dependent content, kept in one block so replays compare
  // clean
  auto now = std::chrono::system_clock::now().time_since_epoch();
  m["timing"] = {
      {"wall_seconds", wall_seconds},
      {"timestamp_unix",
       std::chrono::duration_cast<std::chrono::milliseconds>(now).count()}};
  std::ofstream os(dir / "manifest.json");
  if (!os) throw config_error("cannot open manifest in " + dir.string());
  os << m.dump(2) << '\n';
}

}  // namespace w2d
