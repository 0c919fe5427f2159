#pragma once
// Group convolution (f * K)(z) = int f(w) K(w^-1 z) dw by direct quadrature:
// f constant per cell, kernel midpoint in x and integrated exactly across the
// cell's t-extent. The source cell containing z (where w^-1 z is near e)
// contributes the exact mean of rho^(alpha-Q) over the Koranyi ball of the
// cell's measure.

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "hha/error.hpp"
#include "hha/field.hpp"
#include "hha/kernel.hpp"
#include "hha/maximal.hpp"

namespace hha {

namespace detail {

/// Nonzero source cells in structure-of-arrays layout, weights premultiplied
/// by the cell volume.
struct SourceCells {
  std::vector<double> w1, w2, wt, weight;
  std::vector<std::size_t> index;
  std::array<double, 3> lo{}, hi{};
  double ht = 0.0;

  explicit SourceCells(const Field& f) : ht(f.grid().spec().ht) {
    const Grid& g = f.grid();
    const double cv = g.cell_volume();
    lo = {1e300, 1e300, 1e300};
    hi = {-1e300, -1e300, -1e300};
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i] == 0.0) continue;
      const Point1 c = g.center(i);
      w1.push_back(c.x[0]);
      w2.push_back(c.x[1]);
      wt.push_back(c.t);
      weight.push_back(f[i] * cv);
      index.push_back(i);
      for (int a = 0; a < 3; ++a) {
        lo[a] = std::min(lo[a], c.coord(a));
        hi[a] = std::max(hi[a], c.coord(a));
      }
    }
  }

  bool empty() const { return weight.empty(); }
};

/// Mean of rho^e (1 + c u1 / rho) over tau in [tau0 - H, tau0 + H] at fixed
/// |u|^4 = a, where rho^4 = a + 16 tau^2 and c is 0 (riesz) or 1/2 (angular).
/// Midpoint when rho^4 varies by < 10% across the interval, otherwise the
/// substitution tau = sqrt(a)/4 sinh(s) and Gauss-Legendre on pieces of s.
inline double t_average(double e, double c, double u1, double a, double tau0, double H) {
  const double lo = std::max(0.0, std::abs(tau0) - H), hi = std::abs(tau0) + H;
  const double r4 = a + 16.0 * tau0 * tau0;
  if (a + 16.0 * hi * hi <= 1.1 * (a + 16.0 * lo * lo)) {
    const double v = std::pow(r4, 0.25 * e);
    return c == 0.0 ? v : v * (1.0 + c * u1 / std::sqrt(std::sqrt(r4)));
  }
  const double t0 = tau0 - H, t1 = tau0 + H;
  if (a == 0.0) {
    // (16 tau^2)^(e/4) = 4^(e/2) |tau|^(e/2); the interval excludes 0 here.
    if (t0 <= 0.0 && t1 >= 0.0) return std::pow(r4, 0.25 * e);
    const double g = 0.5 * e + 1.0;
    const double x0 = std::abs(t0), x1 = std::abs(t1);
    const double prim = g == 0.0 ? std::log(std::max(x0, x1) / std::min(x0, x1))
                                 : std::abs(std::pow(x1, g) - std::pow(x0, g)) / g;
    return std::pow(4.0, 0.5 * e) * prim / (2.0 * H);
  }
  static constexpr std::array<double, 5> gx{-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                            0.9061798459386640};
  static constexpr std::array<double, 5> gw{0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                            0.4786286704993665, 0.2369268850561891};
  const double sa = std::sqrt(a);
  const double s0 = std::asinh(4.0 * t0 / sa), s1 = std::asinh(4.0 * t1 / sa);
  const double g = 0.5 * e + 1.0;
  // integral = a^(e/4 + 1/2)/4 int cosh^g + c u1 a^(e/4 + 1/4)/4 int cosh^(g - 1/2)
  const auto log_cosh = [](double s) {
    const double x = std::abs(s);
    return x + std::log1p(std::exp(-2.0 * x)) - std::log(2.0);
  };
  double i0 = 0.0, i1 = 0.0;
  if (g == 0.0 && c == 0.0) {
    i0 = s1 - s0;
  } else {
    const int pieces = std::max(1, static_cast<int>(std::ceil((s1 - s0) / 1.5)));
    const double w = (s1 - s0) / pieces;
    for (int k = 0; k < pieces; ++k) {
      const double mid = s0 + (k + 0.5) * w;
      for (std::size_t q = 0; q < gx.size(); ++q) {
        const double lc = log_cosh(mid + 0.5 * w * gx[q]);
        i0 += gw[q] * std::exp(g * lc);
        if (c != 0.0) i1 += gw[q] * std::exp((g - 0.5) * lc);
      }
    }
    i0 *= 0.5 * w;
    i1 *= 0.5 * w;
  }
  double integral = std::pow(a, 0.25 * e + 0.5) * 0.25 * i0;
  if (c != 0.0) integral += c * u1 * std::pow(a, 0.25 * e + 0.25) * 0.25 * i1;
  return integral / (2.0 * H);
}

/// sum_w weight(w) <K(w^-1 z)>, skipping source index `skip`, where <.> is the
/// exact mean over the source cell's t-extent (midpoint in x).
inline double kernel_sum(const SourceCells& s, const Kernel& k, const Point1& z, std::size_t skip) {
  const std::size_t n = s.weight.size();
  const double z1 = z.x[0], z2 = z.x[1], zt = z.t;
  const double e = k.alpha - k.Q;
  const double c = k.family == KernelFamily::riesz ? 0.0 : 0.5;
  const double H = 0.5 * s.ht;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == skip) continue;
    const double u1 = z1 - s.w1[i], u2 = z2 - s.w2[i];
    const double tt = zt - s.wt[i] + 0.5 * (s.w1[i] * z2 - s.w2[i] * z1);
    const double uu = u1 * u1 + u2 * u2;
    acc += s.weight[i] * t_average(e, c, u1, uu * uu, tt, H);
  }
  return acc;
}

inline double singular_term(const Field& f, const Kernel& k, const Point1& z, std::size_t& cell) {
  cell = static_cast<std::size_t>(-1);
  const auto loc = f.grid().locate(z);
  if (!loc) return 0.0;
  cell = f.grid().index((*loc)[0], (*loc)[1], (*loc)[2]);
  const double cv = f.grid().cell_volume();
  return f[cell] * k.singular_value(cv, kUnitBallMeasure) * cv;
}

}  // namespace detail

/// (f * K)(z) at a single point.
inline double convolve_at(const Field& f, const Kernel& k, const Point1& z) {
  const detail::SourceCells src(f);
  std::size_t cell;
  const double sing = detail::singular_term(f, k, z, cell);
  // Map the grid index of the singular cell to its position among the nonzero cells.
  std::size_t skip = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < src.index.size(); ++i)
    if (src.index[i] == cell) skip = i;
  return sing + detail::kernel_sum(src, k, z, skip);
}

/// (f * K)(z) at each of `points`, sharing the source preprocessing.
inline std::vector<double> convolve_points(const Field& f, const Kernel& k, const std::vector<Point1>& points) {
  const detail::SourceCells src(f);
  std::vector<std::size_t> position(f.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < src.index.size(); ++i) position[src.index[i]] = i;
  std::vector<double> out;
  out.reserve(points.size());
  for (const auto& z : points) {
    std::size_t cell;
    const double sing = detail::singular_term(f, k, z, cell);
    const std::size_t skip = cell == static_cast<std::size_t>(-1) ? cell : position[cell];
    out.push_back(sing + detail::kernel_sum(src, k, z, skip));
  }
  return out;
}

/// f * K sampled at the cell centers of `out` (defaults to f's grid).
inline Field convolve(const Field& f, const Kernel& k, std::optional<Grid> out = std::nullopt) {
  const Grid og = out.value_or(f.grid());
  const detail::SourceCells src(f);
  if (!src.empty() && !og.contains_box(src.lo, src.hi, 0))
    throw DomainError("output grid does not cover the support of the convolved field");
  std::vector<std::size_t> position(f.size(), static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < src.index.size(); ++i) position[src.index[i]] = i;
  std::vector<double> v(og.size(), 0.0);
  if (src.empty()) return Field(og, std::move(v));
  for (std::size_t o = 0; o < og.size(); ++o) {
    const Point1 z = og.center(o);
    std::size_t cell;
    const double sing = detail::singular_term(f, k, z, cell);
    const std::size_t skip = cell == static_cast<std::size_t>(-1) ? cell : position[cell];
    v[o] = sing + detail::kernel_sum(src, k, z, skip);
  }
  return Field(og, std::move(v));
}

}  // namespace hha
