#include "w2d/membership.hpp"

namespace w2d {

MembershipReport in_S_discrete(const GridFunction& u, const GridFunction& f,
                               const Ellipticity& ell, const MembershipOptions& opts) {
  if (u.grid.get() != f.grid.get())
    throw input_error("in_S_discrete: u and f live on different grids");
  const CutCellGrid& G = *u.grid;
  const int n = G.dim();
  auto H = discrete_hessian(u);
  bool any_deep = false;
  for (int i = 0; i < G.n_interior() && !any_deep; ++i) any_deep = H.valid[i];
  if (!any_deep)
    throw input_error("in_S_discrete: grid has no full-stencil interior nodes "
                      "(need at least 2 interior layers)");

  MembershipReport rep;
  rep.tau = opts.report_tol + opts.truncation_allowance;
  std::vector<int> judged_ids;
  for (int i = 0; i < G.n_interior(); ++i)
    if (H.valid[i]) judged_ids.push_back(i);
  rep.nodes.resize(judged_ids.size());
  parallel_for(long(judged_ids.size()), [&](long k) {
    int i = judged_ids[k];
    auto block = H.H[i].topLeftCorner(n, n);
    NodeMargin m;
    m.node = i;
    m.minus_margin = pucci_minus(block, ell) - f.interior[i];
    m.plus_margin = f.interior[i] - pucci_plus(block, ell);
    m.pass = m.minus_margin <= rep.tau && m.plus_margin <= rep.tau;
    rep.nodes[k] = m;
  });
  rep.judged = long(rep.nodes.size());
  for (const auto& m : rep.nodes)
    if (m.pass) ++rep.passed;
  rep.fraction = rep.judged > 0 ? double(rep.passed) / double(rep.judged) : 0.0;
  return rep;
}

}  // namespace w2d
