#pragma once

#include "w2d/common.hpp"

#include <array>
#include <cmath>
#include <cstdint>

namespace w2d {

// Closed dyadic cube Π [c_i 2^-s, (c_i+1) 2^-s], sides parallel to the axes.
// All containment and disjointness logic is exact integer arithmetic; double
// coordinates are exact because levels stay <= 24.
struct DyadicCube {
  int level = 0;
  std::array<std::int64_t, 3> corner{0, 0, 0};
  int dim = 2;

  double side() const { return std::ldexp(1.0, -level); }
  double diam() const { return side() * std::sqrt(double(dim)); }

  Vec3 lower() const {
    Vec3 p = Vec3::Zero();
    for (int d = 0; d < dim; ++d) p[d] = std::ldexp(double(corner[d]), -level);
    return p;
  }
  Vec3 upper() const {
    Vec3 p = Vec3::Zero();
    for (int d = 0; d < dim; ++d) p[d] = std::ldexp(double(corner[d] + 1), -level);
    return p;
  }
  Vec3 center() const {
    Vec3 p = Vec3::Zero();
    for (int d = 0; d < dim; ++d)
      p[d] = std::ldexp(double(2 * corner[d] + 1), -level - 1);
    return p;
  }

  DyadicCube parent() const {
    DyadicCube p = *this;
    p.level = level - 1;
    for (int d = 0; d < dim; ++d)
      p.corner[d] = (corner[d] >= 0) ? corner[d] / 2 : (corner[d] - 1) / 2;
    return p;
  }

  DyadicCube child(int k) const {
    DyadicCube c = *this;
    c.level = level + 1;
    for (int d = 0; d < dim; ++d)
      c.corner[d] = 2 * corner[d] + ((k >> d) & 1);
    return c;
  }

  bool contains_point(const Vec3& x) const {
    for (int d = 0; d < dim; ++d) {
      double t = std::ldexp(x[d], level);  // exact
      if (t < double(corner[d]) || t > double(corner[d] + 1)) return false;
    }
    return true;
  }

  // true iff *this contains `other` (as an ancestor at a coarser-or-equal level)
  bool is_ancestor_of(const DyadicCube& other) const {
    if (other.level < level) return false;
    const std::int64_t m = std::int64_t(1) << (other.level - level);
    for (int d = 0; d < dim; ++d) {
      std::int64_t c = other.corner[d];
      std::int64_t a = (c >= 0) ? c / m : -((-c + m - 1) / m);  // floor division
      if (a != corner[d]) return false;
    }
    return true;
  }

  bool operator==(const DyadicCube& o) const {
    return level == o.level && dim == o.dim && corner == o.corner;
  }
};

// 6/5-dilation of a dyadic cube about its center. Endpoint i spans
// [(10 c_i - 1) 2^-s / 10, (10 c_i + 11) 2^-s / 10]; comparisons against
// points multiply through by 10 * 2^s, which doubles evaluate exactly for
// any coordinate with <= 49 mantissa bits in play.
struct DilatedCube {
  DyadicCube base;

  Vec3 lower() const {
    Vec3 p = Vec3::Zero();
    for (int d = 0; d < base.dim; ++d)
      p[d] = std::ldexp(double(10 * base.corner[d] - 1), -base.level) / 10.0;
    return p;
  }
  Vec3 upper() const {
    Vec3 p = Vec3::Zero();
    for (int d = 0; d < base.dim; ++d)
      p[d] = std::ldexp(double(10 * base.corner[d] + 11), -base.level) / 10.0;
    return p;
  }

  bool contains_point(const Vec3& x) const {
    for (int d = 0; d < base.dim; ++d) {
      double t = 10.0 * std::ldexp(x[d], base.level);
      if (t < double(10 * base.corner[d] - 1) || t > double(10 * base.corner[d] + 11))
        return false;
    }
    return true;
  }
};

}  // namespace w2d
