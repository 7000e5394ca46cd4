#pragma once

#include "w2d/manufactured.hpp"
#include "w2d/membership.hpp"
#include "w2d/norms.hpp"

namespace w2d {

// Exponent bundle of the estimate chain. Violating specs are flagged, never
// rejected: such runs are sharpness probes.
struct QuasiNormSpec {
  double delta = 0.4;
  double delta0 = 0.5;     // working interior exponent (calibrated empirically)
  double p = 8.0;          // integrability of f, in (n, inf)
  double alpha = 1.0;      // boundary Hölder exponent
  double alpha0 = 0.15;    // effective boundary exponent
  double alpha_bar = 0.2;  // working flat-boundary exponent
  double lambda = 1.0;
  double Lambda = 2.0;

  // alpha0 < min{alpha, alpha_bar, 1 - n/p}, delta <= delta0,
  // delta < 1/(1 - alpha0)
  bool admissible(int dim, std::string* why = nullptr) const;
};

// ---------------------------------------------------------------------------
// pointwise boundary fit
// ---------------------------------------------------------------------------

struct AffineFit {
  double value = 0.0;  // l(x0)
  Vec3 gradient = Vec3::Zero();

  double eval(const Vec3& x, const Vec3& x0) const {
    return value + gradient.dot(x - x0);
  }
};

struct BoundaryFitResult {
  AffineFit l;                                     // fitted on the smallest radius
  double C_fit = 0.0;                              // max over radii of sup |u-l| / r^(1+alpha0)
  std::vector<std::pair<double, double>> per_radius;  // (r, C(r))
  double grad_norm = 0.0;                          // |Du(x0)| surrogate
};

// Least-squares affine fit of u on Omega_{r_min}(x0) and the Hölder-growth
// constants sup_{Omega_r} |u - l| / r^(1+alpha0) across the given radii.
BoundaryFitResult holder_boundary_fit(const GridFunction& u, const Vec3& x0,
                                      const QuasiNormSpec& spec,
                                      const std::vector<double>& radii);

// ---------------------------------------------------------------------------
// interior estimate ratio (scale-invariant form)
// ---------------------------------------------------------------------------

struct InteriorRatio {
  double value = 0.0;
  bool degenerate = false;  // 0/0 convention
};

// r^(2 - n/delta0) ||D2u||_{L^delta0(B_{r/2})} /
//   (||u||_inf(B_r) + r ||f||_{L^n(B_r)}); B_r must sit inside the domain.
InteriorRatio interior_ratio(const GridFunction& u, const GridFunction& f,
                             const Vec3& center, double r, const QuasiNormSpec& spec);

// ---------------------------------------------------------------------------
// per-cube estimate chain
// ---------------------------------------------------------------------------

struct CubeRecord {
  int cube_id = -1;
  int level = 0;
  double d = 0.0;            // cube diameter d_k
  bool skipped = false;      // below grid resolution (d < 8h)
  double c_aff = 0.0;        // ||u - l||_inf(Q~) / (d^(1+alpha0) H)
  double interior_ratio = 0.0;  // per-cube rescaled interior estimate ratio
  double hess_mass = 0.0;    // sum_{Q} |D2u|^delta h^n
  double c_hess = 0.0;       // hess_mass / (d^(n-(1-a0)d) H^d + d^(n-dn/p) ||f||^d)
};

struct EstimateReport {
  QuasiNormSpec spec;
  bool spec_admissible = true;
  std::string spec_note;

  double H = 0.0;            // ||u||_inf + ||f||_Lp + ||g||_C1alpha
  double norm_u_inf = 0.0, norm_f_lp = 0.0, norm_g_c1a = 0.0;

  std::vector<CubeRecord> cubes;
  std::vector<std::pair<int, double>> level_mass;  // per-level Hessian delta-mass

  double sum_mass = 0.0;       // over judged cubes
  double rhs_aggregate = 0.0;  // C-free right side of the summed estimate
  double global_ratio = 0.0;   // sum_mass / rhs_aggregate
  double max_c_aff = 0.0;
  double max_c_hess = 0.0;

  long judged_cubes = 0;
  long skipped_cubes = 0;
  double skipped_mass_bound = 0.0;  // band measure x max observed |D2u|^delta

  // Divergence detector. Asymptotically the per-level mass slope is the
  // density slope minus 1 (layer measures halve per level), so "mass slope
  // >= 0" and "density slope >= 1" coincide; at the shallow levels a desk
  // grid can judge, only the density form is reliable.
  bool divergence_flag = false;
  double level_mass_slope = 0.0;     // log2 slope of per-level masses (raw)
  double level_density_slope = 0.0;  // log2 slope of mass / layer measure
};

// Mirrors the per-cube proof chain over {Q_k : Q~_k in Omega_{1/4}}: affine
// fit at the nearest boundary sample, per-cube Hessian delta-mass against the
// two-term bound, and the dyadic-sum aggregate.
EstimateReport cube_chain_report(const GridFunction& u, const GridFunction& f,
                                 const Eigen::VectorXd& g, const WhitneyCover& cover,
                                 const QuasiNormSpec& spec,
                                 double quarter_radius = 0.25);

// ---------------------------------------------------------------------------
// theorem-level ratios
// ---------------------------------------------------------------------------

struct TheoremBreakdown {
  double norm_u = 0.0, norm_du = 0.0, norm_d2u = 0.0;
  double H = 0.0;
};

// (||u||_delta + ||Du||_delta + ||D2u||_delta over Omega ∩ B_inner(center))
// divided by H; the full W^{2,delta} quasi-norm computed directly.
double theorem_ratio(const GridFunction& u, const GridFunction& f,
                     const Eigen::VectorXd& g, const QuasiNormSpec& spec,
                     double inner_radius, const Vec3& center = Vec3::Zero(),
                     TheoremBreakdown* breakdown = nullptr);

// ---------------------------------------------------------------------------
// finite boundary cover (global patching)
// ---------------------------------------------------------------------------

struct Chart {
  Vec3 center = Vec3::Zero();  // on the designated boundary portion T
  double r = 0.0;              // chart ball radius
};

struct ChartResult {
  Chart chart;
  double local_ratio = 0.0;
  double H_local = 0.0;
};

struct PatchResult {
  std::vector<ChartResult> charts;
  double interior_ratio = 0.0;
  double global_ratio = 0.0;   // max of chart ratios and the interior piece
  int coverage_samples = 0;
};

// T is the graph part of the boundary with |x'| <= t_extent. The chart balls
// B_{r_i/12}(x_i) must cover T (checked by sampling); gaps raise input_error
// listing uncovered samples.
PatchResult global_patch(const GridFunction& u, const GridFunction& f,
                         const Eigen::VectorXd& g, const QuasiNormSpec& spec,
                         const std::vector<Chart>& charts, double t_extent,
                         double omega_prime_radius, int coverage_samples,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// refinement-stability dichotomy for the power barrier
// ---------------------------------------------------------------------------

struct SharpnessCell {
  double delta = 0.0;
  double alpha0 = 0.0;
  bool stable = false;          // detector verdict
  bool predicted_stable = false;  // sign of 1 - delta (1 - alpha0)
  double mass_finest = 0.0;     // discrete delta-mass at the finest grid
  double oracle_mass = 0.0;     // closed-form integral over the resolved region
  double rel_err_vs_oracle = 0.0;
  double last_rel_change = 0.0;
};

// Sweeps quasi_norm(D2 x_n^(1+alpha0), delta, Omega_region) across grids and
// compares the stability verdict with the integrability criterion
// delta (1 - alpha0) < 1. `threshold` is the relative-change cutoff.
std::vector<SharpnessCell> sharpness_sweep(std::shared_ptr<const GraphDomain> domain,
                                           const std::vector<double>& h_list,
                                           const std::vector<double>& deltas,
                                           const std::vector<double>& alpha0s,
                                           double region_radius,
                                           double threshold = 0.15);

// Closed-form delta-mass of the power-barrier Hessian over the half-disk
// Omega ∩ B_rho (n = 2), integrating x_n from `cut` upward.
double barrier_mass_oracle(double alpha0, double delta, double rho, double cut);

}  // namespace w2d
