#pragma once
// Heisenberg group arithmetic in exponential coordinates.
//
// H^n is R^{2n} x R with (x,t).(y,s) = (x+y, t+s+x^T J y), where
// J = 1/2 [[0, -I], [I, 0]], and the parabolic dilations r.(x,t) = (rx, r^2 t).
// Everything here is exact arithmetic on points; no grids.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hha/error.hpp"

namespace hha {

/// Dimension data for H^n. Q = 2n+2 is the homogeneous dimension.
template <int N>
struct GroupContext {
  static_assert(N >= 1, "H^n needs n >= 1");
  static constexpr int n = N;
  static constexpr int Q = 2 * N + 2;
  static constexpr int coords = 2 * N + 1;
};

template <int N>
struct Point {
  std::array<double, 2 * N> x{};
  double t = 0.0;

  static constexpr Point identity() { return {}; }

  bool operator==(const Point&) const = default;

  /// Coordinate k in 0..2n (k == 2n is t).
  double coord(int k) const { return k < 2 * N ? x[static_cast<std::size_t>(k)] : t; }
  double& coord(int k) { return k < 2 * N ? x[static_cast<std::size_t>(k)] : t; }

  bool finite() const {
    for (double v : x)
      if (!std::isfinite(v)) return false;
    return std::isfinite(t);
  }
};

using Point1 = Point<1>;
using Context1 = GroupContext<1>;

/// Builds a point from runtime-sized data; throws DimensionError on mismatch.
template <int N>
Point<N> make_point(std::span<const double> x, double t) {
  if (x.size() != static_cast<std::size_t>(2 * N))
    throw DimensionError("point needs " + std::to_string(2 * N) + " x-coordinates, got " +
                         std::to_string(x.size()));
  Point<N> p;
  std::copy(x.begin(), x.end(), p.x.begin());
  p.t = t;
  return p;
}

inline Point1 make_point1(double x1, double x2, double t) { return Point1{{x1, x2}, t}; }

/// x^T J y = 1/2 sum_i (-x_i y_{i+n} + x_{i+n} y_i).
template <int N>
constexpr double symplectic(const std::array<double, 2 * N>& x, const std::array<double, 2 * N>& y) {
  double s = 0.0;
  for (int i = 0; i < N; ++i) s += -x[i] * y[i + N] + x[i + N] * y[i];
  return 0.5 * s;
}

template <int N>
constexpr Point<N> group_mul(GroupContext<N>, const Point<N>& z, const Point<N>& w) {
  Point<N> r;
  for (int i = 0; i < 2 * N; ++i) r.x[i] = z.x[i] + w.x[i];
  r.t = z.t + w.t + symplectic<N>(z.x, w.x);
  return r;
}

template <int N>
constexpr Point<N> group_mul(const Point<N>& z, const Point<N>& w) {
  return group_mul(GroupContext<N>{}, z, w);
}

template <int N>
constexpr Point<N> group_inv(const Point<N>& z) {
  Point<N> r;
  for (int i = 0; i < 2 * N; ++i) r.x[i] = -z.x[i];
  r.t = -z.t;
  return r;
}

template <int N>
Point<N> dilate(double r, const Point<N>& z) {
  if (!(r > 0.0)) throw DomainError("dilation factor must be positive");
  Point<N> out;
  for (int i = 0; i < 2 * N; ++i) out.x[i] = r * z.x[i];
  out.t = r * r * z.t;
  return out;
}

/// |x|^4 + 16 t^2, the polynomial whose fourth root is the Koranyi norm.
template <int N>
constexpr double koranyi_fourth(const Point<N>& z) {
  double x2 = 0.0;
  for (double v : z.x) x2 += v * v;
  return x2 * x2 + 16.0 * z.t * z.t;
}

template <int N>
double koranyi_norm(const Point<N>& z) {
  return std::sqrt(std::sqrt(koranyi_fourth(z)));
}

/// rho(z^{-1} w): the left-invariant gauge distance.
template <int N>
double gauge_distance(const Point<N>& z, const Point<N>& w) {
  return koranyi_norm(group_mul(group_inv(z), w));
}

template <int N>
struct Ball {
  Point<N> center{};
  double radius = 1.0;

  Ball() = default;
  Ball(Point<N> c, double r) : center(c), radius(r) {
    if (!(r > 0.0)) throw DomainError("ball radius must be positive");
  }

  /// The concentric ball with radius scaled by `factor`.
  Ball scaled(double factor) const { return Ball(center, radius * factor); }
};

using Ball1 = Ball<1>;

/// Strict membership: rho(center^{-1} z) < radius.
template <int N>
bool ball_contains(const Ball<N>& b, const Point<N>& z) {
  return koranyi_fourth(group_mul(group_inv(b.center), z)) < b.radius * b.radius * b.radius * b.radius;
}

/// Multiindex I = (i_1, ..., i_{2n+1}); the last entry is the t-power.
template <int N>
struct MultiIndex {
  std::array<int, 2 * N + 1> i{};

  bool operator==(const MultiIndex&) const = default;

  static MultiIndex unit(int k) {
    MultiIndex m;
    m.i[static_cast<std::size_t>(k)] = 1;
    return m;
  }
};

using MultiIndex1 = MultiIndex<1>;

struct Degrees {
  int length = 0;
  int homdeg = 0;
  bool operator==(const Degrees&) const = default;
};

template <int N>
Degrees multiindex_degrees(const MultiIndex<N>& I) {
  Degrees d;
  for (int k = 0; k < 2 * N + 1; ++k) {
    if (I.i[k] < 0) throw DomainError("multiindex entries must be nonnegative");
    d.length += I.i[k];
    d.homdeg += (k == 2 * N ? 2 : 1) * I.i[k];
  }
  return d;
}

template <int N>
int homogeneous_degree(const MultiIndex<N>& I) {
  return multiindex_degrees(I).homdeg;
}

/// All multiindices with homogeneous degree <= max_degree, ordered by degree then
/// lexicographically. Deterministic; used as the monomial basis and derivative list.
template <int N>
std::vector<MultiIndex<N>> multiindices_up_to(int max_degree) {
  std::vector<MultiIndex<N>> out;
  if (max_degree < 0) return out;
  constexpr int K = 2 * N + 1;
  for (int deg = 0; deg <= max_degree; ++deg) {
    MultiIndex<N> cur;
    std::function<void(int, int)> rec = [&](int k, int remaining) {
      if (k == K - 1) {
        if (remaining % 2 == 0) {
          cur.i[k] = remaining / 2;
          out.push_back(cur);
        }
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        cur.i[k] = v;
        rec(k + 1, remaining - v);
      }
      cur.i[k] = 0;
    };
    rec(0, deg);
  }
  return out;
}

inline double ipow(double base, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

template <int N>
double monomial(const MultiIndex<N>& I, const Point<N>& z) {
  double v = 1.0;
  for (int k = 0; k < 2 * N + 1; ++k) v *= ipow(z.coord(k), I.i[k]);
  return v;
}

enum class Side { left, right };

/// Default finite-difference step: 1e-4 * max(1, rho(z)).
template <int N>
double default_fd_step(const Point<N>& z) {
  return 1e-4 * std::max(1.0, koranyi_norm(z));
}

namespace detail {

template <int N, class F>
double nested_difference(const F& f, const std::vector<int>& dirs, std::size_t pos, Side side,
                         const Point<N>& z, double h) {
  if (pos == dirs.size()) return f(z);
  Point<N> step;
  step.coord(dirs[pos]) = h;
  Point<N> back = group_inv(step);
  Point<N> zp, zm;
  if (side == Side::left) {
    zp = group_mul(z, step);
    zm = group_mul(z, back);
  } else {
    zp = group_mul(step, z);
    zm = group_mul(back, z);
  }
  return (nested_difference<N>(f, dirs, pos + 1, side, zp, h) -
          nested_difference<N>(f, dirs, pos + 1, side, zm, h)) /
         (2.0 * h);
}

}  // namespace detail

/// X^I f(z) (left) or X~^I f(z) (right) by nested central differences along the
/// one-parameter flows s -> z.(s e_k) resp. (s e_k).z. X^I = X_1^{i_1} ... X_{2n+1}^{i_{2n+1}},
/// X_1 outermost.
template <int N, class F>
double invariant_derivative(const F& f, const MultiIndex<N>& I, Side side, const Point<N>& z,
                            std::optional<double> h = std::nullopt) {
  const double step = h.value_or(default_fd_step(z));
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  std::vector<int> dirs;
  for (int k = 0; k < 2 * N + 1; ++k)
    for (int c = 0; c < I.i[k]; ++c) dirs.push_back(k);
  return detail::nested_difference<N>(f, dirs, 0, side, z, step);
}

}  // namespace hha
