#pragma once

#include "w2d/hessian.hpp"
#include "w2d/pucci.hpp"

namespace w2d {

// Discrete surrogate of membership in S(lambda, Lambda, f): at every node
// with a full uniform stencil, M^-(D2_h u) - f <= tau and f - M^+(D2_h u)
// <= tau, with tau = report_tol + truncation_allowance. Never a claim about
// viscosity-sense membership.
struct MembershipOptions {
  double report_tol = 0.0;
  double truncation_allowance = 0.0;  // family-specific C_u h^r term
};

struct NodeMargin {
  int node;
  double minus_margin;  // M^-(H) - f
  double plus_margin;   // f - M^+(H)
  bool pass;
};

struct MembershipReport {
  std::vector<NodeMargin> nodes;
  long judged = 0;
  long passed = 0;
  double fraction = 0.0;
  double tau = 0.0;
};

MembershipReport in_S_discrete(const GridFunction& u, const GridFunction& f,
                               const Ellipticity& ell, const MembershipOptions& opts);

}  // namespace w2d
