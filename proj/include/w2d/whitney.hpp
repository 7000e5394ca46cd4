#pragma once

#include "w2d/dyadic.hpp"
#include "w2d/geom.hpp"

#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace w2d {

// Truncated Whitney decomposition of Omega_R: dyadic cubes of levels
// 0..s_max contained in the domain with diam(Q) <= dist(Q, boundary)
// <= 4 diam(Q), filtered to maximal cubes. Geometry near the boundary that
// needs cubes deeper than s_max is reported as residual measure, never
// silently dropped.
class WhitneyCover {
 public:
  struct CubeInfo {
    DyadicCube cube;
    double dist_lo = 0.0;  // certified bounds on dist(Q, boundary)
    double dist_hi = 0.0;
  };

  const std::vector<CubeInfo>& cubes() const { return cubes_; }
  const GraphDomain& domain() const { return *domain_; }
  std::shared_ptr<const GraphDomain> domain_ptr() const { return domain_; }
  int s_max() const { return s_max_; }
  double residual_measure() const { return residual_measure_; }
  double covered_measure() const { return covered_measure_; }

  // index of a kept cube containing x (closed cubes; -1 if none)
  int find_cube_containing(const Vec3& x) const;
  bool has_cube(const DyadicCube& c) const;

  // exact predicate: dilated cube inside Omega_quarter (ball check exact in
  // integers for dyadic-rational quarter radii; graph side via closed-form
  // box extrema)
  bool dilated_in_omega(int cube_id, double quarter_radius) const;

  static WhitneyCover build(std::shared_ptr<const GraphDomain> domain, int s_max);
  static WhitneyCover from_cubes(std::shared_ptr<const GraphDomain> domain, int s_max,
                                 std::vector<CubeInfo> cubes);

 private:
  void index_cubes();

  std::shared_ptr<const GraphDomain> domain_;
  int s_max_ = 0;
  double residual_measure_ = 0.0;
  double covered_measure_ = 0.0;
  std::vector<CubeInfo> cubes_;
  std::vector<std::unordered_map<std::int64_t, int>> level_index_;  // packed corner -> id

  friend WhitneyCover decompose(std::shared_ptr<const GraphDomain>, int);
};

WhitneyCover decompose(std::shared_ptr<const GraphDomain> domain, int s_max);

// number of dilated cubes Q~_k containing the point; Lemma-style bound 12^n
int overlap_count(const WhitneyCover& cover, const Vec3& x);

struct LayerSet {
  int s = 0;                   // level: cubes of side 2^-s, diam sqrt(n) 2^-s
  std::vector<int> cube_ids;   // indices into cover.cubes()
};

// Partition of {Q_k : Q~_k ⊂ Omega_quarter} by level.
std::vector<LayerSet> layers(const WhitneyCover& cover, double quarter_radius);

// Sum over the layer of |Q_k| = 2^{-s n} (exact dyadic rational).
double layer_measure(const WhitneyCover& cover, const LayerSet& layer);

struct DyadicSum {
  double total = 0.0;
  std::vector<std::pair<int, double>> per_level;  // (level, S_s)
};

// Sum of d_k^q over the quarter family with per-level partial sums.
DyadicSum dyadic_sum(const WhitneyCover& cover, double q, double quarter_radius);

// Every quasi-random sample of Omega_inner with dist > 2^{-s_max+3} must lie
// in a cube of the quarter family. Failing samples are reported if requested.
bool verify_cover_inclusion(const WhitneyCover& cover, double inner_radius,
                            double quarter_radius, int samples, std::uint64_t seed,
                            std::vector<Vec3>* uncovered = nullptr);

// width factor of the possibly-uncovered boundary band after truncation
inline double uncovered_band_factor(int dim) { return 2.0 * std::sqrt(double(dim)); }

}  // namespace w2d
