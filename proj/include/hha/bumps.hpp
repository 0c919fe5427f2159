#pragma once
// Smooth compactly supported test functions built from the Koranyi gauge.

#include <cmath>

#include "hha/detail/rng.hpp"
#include "hha/field.hpp"

namespace hha {

/// (1 - rho(c^{-1} z)^4 / r^4)^m inside B(c, r), zero outside. A polynomial in
/// the coordinates on the ball, C^(m-1) across its boundary.
inline double koranyi_bump(const Ball1& b, int m, const Point1& z) {
  const double r2 = b.radius * b.radius;
  const double s = 1.0 - koranyi_fourth(group_mul(group_inv(b.center), z)) / (r2 * r2);
  return s > 0.0 ? ipow(s, m) : 0.0;
}

inline Field sample_bump(const Ball1& b, int m, const Grid& grid, double amplitude = 1.0) {
  return sample([&](const Point1& z) { return amplitude * koranyi_bump(b, m, z); }, grid, b);
}

/// A ball with center uniform in the inner part of the grid box and radius
/// uniform in [r_lo, r_hi], shrunk until it fits with a one-cell margin.
inline Ball1 random_ball(detail::Rng& rng, const Grid& grid, double r_lo, double r_hi) {
  const GridSpec& s = grid.spec();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double r = rng.uniform(r_lo, r_hi);
    const Point1 c = make_point1(s.offset.x[0] + rng.uniform(-1, 1) * (s.Lx - r),
                                 s.offset.x[1] + rng.uniform(-1, 1) * (s.Lx - r),
                                 s.offset.t + rng.uniform(-1, 1) * s.Lt * 0.5);
    const Ball1 b(c, r);
    if (grid_holds_ball(grid, b)) return b;
  }
  throw DomainError("grid too small for the requested random balls");
}

}  // namespace hha
