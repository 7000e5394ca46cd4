#pragma once

#include "w2d/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace w2d {

enum class Profile { Flat, PowerCusp, Sinusoid };

std::string profile_name(Profile p);
Profile profile_from_name(const std::string& name);

// Closed-form boundary graph x_n = phi(x') with certified Lipschitz bound K
// and gradient Hölder exponent alpha. Only closed-form families are allowed:
// they give exact Hölder constants and (for the flat profile) an exact
// boundary distance.
class HolderGraph {
 public:
  static HolderGraph flat();
  // phi(x') = amplitude * |x'|^(1+alpha)
  static HolderGraph power_cusp(double amplitude, double alpha);
  // phi(x') = amplitude * sin(frequency * (x_1 + ... + x_{n-1}))
  static HolderGraph sinusoid(double amplitude, double frequency);

  double value(const Vec3& x, int m) const;    // phi(x'), m = n-1 tangential comps
  Vec3 gradient(const Vec3& x, int m) const;   // D phi(x')
  double max_on_box(const Vec3& lo, const Vec3& hi, int m) const;
  double min_on_box(const Vec3& lo, const Vec3& hi, int m) const;

  double lipschitz_bound() const { return K_; }
  double holder_exponent() const { return alpha_; }
  bool gradient_vanishes_at_origin() const { return profile_ != Profile::Sinusoid; }
  Profile profile() const { return profile_; }
  double amplitude() const { return amplitude_; }
  double frequency() const { return frequency_; }

 private:
  HolderGraph(Profile p, double amplitude, double param, double K, double alpha)
      : profile_(p), amplitude_(amplitude), frequency_(param), K_(K), alpha_(alpha) {}

  Profile profile_;
  double amplitude_ = 0.0;  // cusp/sinusoid amplitude
  double frequency_ = 0.0;  // cusp: exponent alpha; sinusoid: wave number
  double K_;
  double alpha_;
};

// Omega_R = {x_n > phi(x')} ∩ B_R with 0 on the boundary. Immutable; every
// query is a pure function.
class GraphDomain {
 public:
  GraphDomain(HolderGraph graph, double radius, int dim);

  int dim() const { return dim_; }
  double radius() const { return radius_; }
  const HolderGraph& graph() const { return graph_; }

  bool contains(const Vec3& x) const;
  // Checked entry point: throws input_error on dimension mismatch.
  bool contains(const Eigen::VectorXd& x) const;

  // Unsigned distance to the surface {(y', phi(y'))} ∪ sphere |x| = R.
  // Exact for the flat profile; otherwise certified to ~1e-10 * R.
  double surface_dist(const Vec3& x) const;

  // dist(x, ∂(Omega ∩ B_R)) for x inside the domain (contract checked).
  double boundary_dist(const Vec3& x) const;

  // `count` surface points (x', phi(x')) with x' on a uniform lattice of
  // B'_{R/2}; count = 1 returns the origin.
  std::vector<Vec3> boundary_points(int count) const;

  // Lebesgue measure of Omega_R by adaptive quadrature (exact up to `tol`).
  double measure(double tol = 1e-11) const;

  // Upper bound on |{x in Omega : dist(x, boundary) <= t}|.
  double band_measure_upper(double t) const;

  // Cheap pointwise bounds on the graph distance; lower <= dist <= upper with
  // upper = x_n - phi(x') and lower = upper / sqrt(1 + K^2).
  double vertical_clearance(const Vec3& x) const;
  double dist_lower_bound(const Vec3& x) const;

 private:
  double graph_dist(const Vec3& x) const;
  double graph_dist_1d(const Vec3& x) const;
  double graph_dist_2d(const Vec3& x) const;

  HolderGraph graph_;
  double radius_;
  int dim_;
};

// Adaptive Simpson quadrature, shared by measure computations and the
// closed-form oracles in the estimates module.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

}  // namespace w2d
