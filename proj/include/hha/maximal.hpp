#pragma once
// Centered Hardy-Littlewood and fractional maximal operators on a grid.
//
// (M_alpha f)(z) ~ max_r |B(z,r)|^(alpha/Q - 1) int_{B(z,r)} |f| over a geometric
// radius schedule, evaluated at every cell center of f's grid. Ball integrals
// use per-column prefix sums along t: for fixed w_x the set {w : rho(z^-1 w) < r}
// is one t-interval. |B(z,r)| is the lattice measure of the same discrete ball
// (exact for constant fields) until r is large enough that c r^Q is accurate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "hha/error.hpp"
#include "hha/exponent.hpp"
#include "hha/field.hpp"
#include "hha/luxemburg.hpp"

namespace hha {

/// |B(e,1)| in H^1.
inline constexpr double kUnitBallMeasure = std::numbers::pi * std::numbers::pi / 8.0;

struct RadiiSchedule {
  double r_min = 1.0 / 16;
  double r_max = 16.0;
  int per_octave = 8;

  void validate() const {
    if (!(r_min > 0.0) || !(r_max >= r_min) || !std::isfinite(r_max) || per_octave < 1)
      throw DomainError("radius schedule needs 0 < r_min <= r_max and per_octave >= 1");
  }

  std::vector<double> radii() const {
    validate();
    std::vector<double> out;
    for (int k = 0;; ++k) {
      const double r = r_min * std::exp2(static_cast<double>(k) / per_octave);
      if (r > r_max * (1 + 1e-12)) break;
      out.push_back(r);
    }
    return out;
  }

  RadiiSchedule dilated(double d) const { return {r_min * d, r_max * d, per_octave}; }

  /// r in [hx, 2 * box diameter], 8 per octave.
  static RadiiSchedule for_grid(const Grid& g, int per_octave = 8) {
    const double Lx = 0.5 * g.nx() * g.spec().hx, Lt = 0.5 * g.nt() * g.spec().ht;
    const double diam = koranyi_norm(make_point1(2 * Lx, 2 * Lx, 2 * Lt)) + 2 * Lx;
    return {g.spec().hx, 2.0 * diam, per_octave};
  }
};

namespace detail {

/// Prefix sums of |f| along t for every nonzero column, plus the bounding data
/// needed to prune radii.
struct ColumnData {
  struct Column {
    int a, b;
    std::size_t offset;  // into prefix, nt + 1 entries
  };
  std::vector<Column> columns;
  std::vector<double> prefix;
  double total = 0.0;
  Point1 hull_center{};
  double hull_radius = 0.0;
  bool empty = true;
};

inline ColumnData build_columns(const Field& f) {
  const Grid& g = f.grid();
  ColumnData d;
  const int nx = g.nx(), nt = g.nt();
  std::array<double, 3> lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < nx; ++b) {
      bool nonzero = false;
      for (int c = 0; c < nt; ++c)
        if (f.at(a, b, c) != 0.0) {
          nonzero = true;
          lo[2] = std::min(lo[2], g.axis(2)[c]);
          hi[2] = std::max(hi[2], g.axis(2)[c]);
        }
      if (!nonzero) continue;
      lo[0] = std::min(lo[0], g.axis(0)[a]);
      hi[0] = std::max(hi[0], g.axis(0)[a]);
      lo[1] = std::min(lo[1], g.axis(1)[b]);
      hi[1] = std::max(hi[1], g.axis(1)[b]);
      ColumnData::Column col{a, b, d.prefix.size()};
      double s = 0.0;
      d.prefix.push_back(0.0);
      for (int c = 0; c < nt; ++c) {
        s += std::abs(f.at(a, b, c));
        d.prefix.push_back(s);
      }
      d.total += s;
      d.columns.push_back(col);
    }
  d.empty = d.columns.empty();
  if (d.empty) return d;
  d.hull_center = make_point1(0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2]));
  // For w in the hull, c^-1 w = (u, dt + (c1 u2 - c2 u1)/2) with |u| <= umax.
  const double umax = 0.5 * std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
  const double tmax = 0.5 * (hi[2] - lo[2]) + 0.5 * std::hypot(d.hull_center.x[0], d.hull_center.x[1]) * umax;
  d.hull_radius = std::sqrt(std::sqrt(ipow(umax, 4) + 16.0 * tmax * tmax)) * (1 + 1e-12) + 1e-12;
  return d;
}

/// rho(z^-1 w)^4 for w = z + (i hx, j hx, k ht) in lattice offsets from z = (x1, x2, .).
/// The t-coordinate of z drops out, so membership of lattice offsets in B(z, r)
/// is the same for every cell of a column.
inline double offset_gauge4(double x1, double x2, int i, int j, int k, double hx, double ht) {
  const double u1 = i * hx, u2 = j * hx;
  const double uu = u1 * u1 + u2 * u2;
  const double tt = k * ht + 0.5 * (x1 * u2 - x2 * u1);
  return uu * uu + 16.0 * tt * tt;
}

/// The offsets k with offset_gauge4(x1, x2, i, j, k) < r4, as a closed range
/// [lo, hi] (empty when lo > hi). A slightly widened analytic interval is
/// shrunk with the exact predicate so boundary ties are decided consistently.
inline std::pair<int, int> offset_t_range(double x1, double x2, int i, int j, double hx, double ht, double r4) {
  const double u1 = i * hx, u2 = j * hx;
  const double uu = u1 * u1 + u2 * u2;
  if (uu * uu >= r4) return {1, 0};
  const double hw = 0.25 * std::sqrt(r4 - uu * uu) * (1 + 1e-9) + 1e-12 * ht;
  const double sigma = 0.5 * (x1 * u2 - x2 * u1);
  int lo = static_cast<int>(std::floor((-sigma - hw) / ht));
  int hi = static_cast<int>(std::ceil((-sigma + hw) / ht));
  while (lo <= hi && !(offset_gauge4(x1, x2, i, j, lo, hx, ht) < r4)) ++lo;
  while (hi >= lo && !(offset_gauge4(x1, x2, i, j, hi, hx, ht) < r4)) --hi;
  return {lo, hi};
}

/// Number of lattice points of the grid through (x1, x2, .) inside B(z, r).
inline double lattice_ball_count(double x1, double x2, double r, double hx, double ht) {
  const double r4 = r * r * r * r;
  const int span = static_cast<int>(std::ceil(r / hx));
  double count = 0.0;
  for (int i = -span; i <= span; ++i)
    for (int j = -span; j <= span; ++j) {
      const auto [lo, hi] = offset_t_range(x1, x2, i, j, hx, ht, r4);
      if (hi >= lo) count += hi - lo + 1;
    }
  return count;
}

/// True when c r^Q replaces the lattice count of B(z, r).
inline bool analytic_ball_measure(double r, double hx, double ht) {
  return r >= 32.0 * hx && 0.25 * r * r >= 16.0 * ht;
}

}  // namespace detail

/// max_r m(z,r)^(alpha/Q - 1) int_{B(z,r)} |f| at every cell center of f's grid.
inline Field frac_maximal(const Field& f, double alpha, const RadiiSchedule& schedule) {
  constexpr int Q = 4;
  if (!(alpha >= 0.0 && alpha < Q)) throw DomainError("fractional maximal operator needs 0 <= alpha < Q");
  const auto radii = schedule.radii();
  if (radii.empty()) throw DomainError("empty radius schedule");
  const Grid& g = f.grid();
  const double hx = g.spec().hx, ht = g.spec().ht, cv = g.cell_volume();
  const int nx = g.nx(), nt = g.nt();
  const auto cols = detail::build_columns(f);
  std::vector<double> out(g.size(), 0.0);
  if (cols.empty) return Field(g, std::move(out));

  const double expo = alpha / Q - 1.0;
  const auto weight = [&](double m, double I) { return alpha == 0.0 ? I / m : std::pow(m, expo) * I; };
  const std::size_t R = radii.size();
  std::vector<double> r4(R);
  for (std::size_t k = 0; k < R; ++k) r4[k] = radii[k] * radii[k] * radii[k] * radii[k];

  struct Near {
    double uu;  // |u|^4
    int i, j;
    std::size_t col;
  };
  std::vector<Near> near;
  std::vector<double> measure(R);
  // Per column and radius: the t-offset range of every nearby column.
  std::vector<std::vector<std::pair<int, int>>> ranges(R);
  std::vector<char> have_ranges(R);

  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < nx; ++b) {
      const double x1 = g.axis(0)[a], x2 = g.axis(1)[b];
      near.clear();
      for (std::size_t c = 0; c < cols.columns.size(); ++c) {
        const int i = cols.columns[c].a - a, j = cols.columns[c].b - b;
        const double u1 = i * hx, u2 = j * hx;
        const double uu = u1 * u1 + u2 * u2;
        near.push_back({uu * uu, i, j, c});
      }
      std::sort(near.begin(), near.end(),
                [](const Near& p, const Near& q) { return p.uu < q.uu || (p.uu == q.uu && p.col < q.col); });

      std::fill(measure.begin(), measure.end(), -1.0);
      const auto ball_measure = [&](std::size_t k) {
        if (measure[k] < 0.0)
          measure[k] = detail::analytic_ball_measure(radii[k], hx, ht)
                           ? kUnitBallMeasure * r4[k]
                           : detail::lattice_ball_count(x1, x2, radii[k], hx, ht) * cv;
        return measure[k];
      };
      std::fill(have_ranges.begin(), have_ranges.end(), 0);

      for (int c = 0; c < nt; ++c) {
        const Point1 z = make_point1(x1, x2, g.axis(2)[c]);
        const double d_low = gauge_distance(cols.hull_center, z) - cols.hull_radius;
        double best = 0.0;
        for (std::size_t k = 0; k < R; ++k) {
          if (radii[k] <= d_low) continue;
          const double m = ball_measure(k);
          if (m <= 0.0) continue;
          if (best > 0.0 && weight(m, cols.total * cv) <= best) break;
          auto& rk = ranges[k];
          if (!have_ranges[k]) {
            rk.clear();
            for (const auto& n : near) {
              if (n.uu >= r4[k]) break;
              rk.push_back(detail::offset_t_range(x1, x2, n.i, n.j, hx, ht, r4[k]));
            }
            have_ranges[k] = 1;
          }
          double I = 0.0;
          for (std::size_t q = 0; q < rk.size(); ++q) {
            const int jlo = std::max(0, c + rk[q].first);
            const int jhi = std::min(nt - 1, c + rk[q].second);
            if (jhi < jlo) continue;
            const double* p = &cols.prefix[cols.columns[near[q].col].offset];
            I += p[jhi + 1] - p[jlo];
          }
          if (I > 0.0) best = std::max(best, weight(m, I * cv));
        }
        out[g.index(a, b, c)] = best;
      }
    }
  return Field(g, std::move(out));
}

inline Field hl_maximal(const Field& f, const RadiiSchedule& schedule) { return frac_maximal(f, 0.0, schedule); }

/// || (sum_j (M_alpha f_j)^r)^(1/r) ||_q / || (sum_j |f_j|^r)^(1/r) ||_p with
/// 1/q = 1/p - alpha/Q (q = p when alpha = 0).
inline double fs_ratio(const std::vector<Field>& fs, double r, double alpha, const ExponentFn& p,
                       const RadiiSchedule& schedule) {
  if (fs.empty()) throw DomainError("fs_ratio needs at least one function");
  if (!(r > 1.0)) throw DomainError("fs_ratio needs r > 1");
  const ExponentFn q = alpha > 0.0 ? sobolev_exponent(p, alpha) : p;
  const Grid& g = fs.front().grid();
  std::vector<double> num(g.size(), 0.0), den(g.size(), 0.0);
  for (const auto& f : fs) {
    if (!(f.grid() == g)) throw DimensionError("fs_ratio needs a common grid");
    const Field m = frac_maximal(f, alpha, schedule);
    for (std::size_t i = 0; i < g.size(); ++i) {
      num[i] += std::pow(m[i], r);
      den[i] += std::pow(std::abs(f[i]), r);
    }
  }
  for (auto& v : num) v = std::pow(v, 1.0 / r);
  for (auto& v : den) v = std::pow(v, 1.0 / r);
  const double d = lp_norm(Field(g, std::move(den)), p);
  if (d == 0.0) throw DomainError("fs_ratio denominator is zero");
  const double n = lp_norm(Field(g, std::move(num)), q);
  const double ratio = n / d;
  if (!std::isfinite(ratio)) throw NumericError("fs_ratio is not finite");
  return ratio;
}

}  // namespace hha
