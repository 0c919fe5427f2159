#pragma once
// Grand maximal function over a finite dictionary of normalized profiles
// phi = P(z) (1 - rho^4)^m on B(e,1), a lower bound for the full M_L f.
//
// (f * phi_t)(z) = int f(w) phi_t(w^-1 z) dw with phi_t(u) = t^-Q phi(dilate(1/t, u)).
// Quadrature: f constant per cell, phi_t midpoint in x and integrated across
// each cell's t-extent, exactly (phi restricted to a line in t is a polynomial
// times (s^2 - 16 tau^2)^m) or by two-point Gauss when the cell is thin
// against the profile. At large scales the source is block-averaged
// (blocks at most t / x_ratio wide and t^2 / t_ratio tall), the result is
// optionally evaluated on block x-centers only and interpolated along
// horizontal (left-translation) directions.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "hha/error.hpp"
#include "hha/exponent.hpp"
#include "hha/field.hpp"
#include "hha/polynomial.hpp"

namespace hha {

/// Geometric scales t_min 10^(k / per_decade) up to t_max.
struct ScaleSchedule {
  double t_min = 1.0 / 16;
  double t_max = 4.0;
  int per_decade = 16;

  void validate() const {
    if (!(t_min > 0.0) || !(t_max >= t_min) || !std::isfinite(t_max) || per_decade < 1)
      throw DomainError("scale schedule needs 0 < t_min <= t_max and per_decade >= 1");
  }

  std::vector<double> scales() const {
    validate();
    std::vector<double> out;
    for (int k = 0;; ++k) {
      const double t = t_min * std::pow(10.0, static_cast<double>(k) / per_decade);
      if (t > t_max * (1 + 1e-12)) break;
      out.push_back(t);
    }
    return out;
  }

  ScaleSchedule dilated(double d) const { return {t_min * d, t_max * d, per_decade}; }

  /// t in [hx, t_max], 16 per decade.
  static ScaleSchedule for_grid(const Grid& g, double t_max = 4.0) { return {g.spec().hx, t_max, 16}; }
};

struct Profile {
  std::string name;
  /// P(z); the profile is scale * P(z) (1 - rho^4)^m inside B(e,1), 0 outside.
  Poly shape;
  int m = 8;
  double scale = 1.0;
  /// Unnormalized Schwartz seminorm of P (1 - rho^4)^m.
  double seminorm = 1.0;

  double operator()(const Point1& z) const {
    const double r4 = koranyi_fourth(z);
    if (r4 >= 1.0) return 0.0;
    return scale * shape(z) * std::pow(1.0 - r4, m);
  }

  /// P (1 - rho^4)^m as a polynomial (valid inside B(e,1)), unnormalized.
  Poly inside() const { return shape * (Poly::constant(1.0) - Poly::gauge_fourth()).pow(m); }
};

/// sum_{d(I) <= L} sup_{rho(z) < 1} (1 + rho)^((L+1)(Q+1)) |X^I phi(z)| for phi
/// supported in B(e,1), with exact left-invariant derivatives and the sup
/// taken over a lattice of `per_axis`^3 points of the bounding box.
inline double schwartz_seminorm(const Poly& inside, int L, int per_axis = 25) {
  if (L < 0) throw DomainError("seminorm order must be nonnegative");
  if (per_axis < 3) throw DomainError("seminorm sampling needs at least 3 points per axis");
  const int Q = 4;
  std::vector<Poly> derivs;
  for (const auto& I : multiindices_up_to<1>(L)) derivs.push_back(inside.apply(I, Side::left));
  PolyEvaluator ev(derivs);
  std::vector<double> sup(derivs.size(), 0.0), vals;
  const double wexp = static_cast<double>((L + 1) * (Q + 1));
  for (int i = 0; i < per_axis; ++i)
    for (int j = 0; j < per_axis; ++j)
      for (int k = 0; k < per_axis; ++k) {
        const auto c = [per_axis](int n, double half) { return half * (-1.0 + 2.0 * n / (per_axis - 1)); };
        const Point1 z = make_point1(c(i, 1.0), c(j, 1.0), c(k, 0.25));
        const double r4 = koranyi_fourth(z);
        if (r4 >= 1.0) continue;
        const double w = std::pow(1.0 + std::sqrt(std::sqrt(r4)), wexp);
        ev.evaluate(z, vals);
        for (std::size_t d = 0; d < vals.size(); ++d) sup[d] = std::max(sup[d], w * std::abs(vals[d]));
      }
  double s = 0.0;
  for (double v : sup) s += v;
  return s;
}

/// Six shapes of increasing oscillation; shape 0 is the positive bump.
inline std::vector<std::pair<std::string, Poly>> default_profile_shapes() {
  const Poly one = Poly::constant(1.0);
  const Poly x1 = Poly::coordinate(0), x2 = Poly::coordinate(1), t = Poly::coordinate(2);
  const Poly r2 = x1 * x1 + x2 * x2;
  return {
      {"bump", one},
      {"odd_x1", x1},
      {"odd_x2_t", x2 + 4.0 * t},
      {"ring", one - 3.0 * r2},
      {"saddle", x1 * x1 - x2 * x2 + 4.0 * (t * x1)},
      {"wave", one - 6.0 * r2 + 5.0 * (r2 * r2) - 48.0 * (t * t)},
  };
}

/// Profile with m = L + 1 (so X^I phi is continuous for d(I) <= L), normalized
/// to unit seminorm of order L.
inline Profile make_profile(const std::string& name, const Poly& shape, int L) {
  Profile p;
  p.name = name;
  p.shape = shape;
  p.m = L + 1;
  p.seminorm = schwartz_seminorm(p.inside(), L);
  if (!(p.seminorm > 0.0) || !std::isfinite(p.seminorm)) throw NumericError("profile seminorm is not finite");
  p.scale = 1.0 / p.seminorm;
  return p;
}

struct GrandMaximalDictionary {
  std::vector<Profile> profiles;
  int L = 7;
  ScaleSchedule t_schedule;

  void validate() const {
    if (profiles.empty()) throw DomainError("grand maximal dictionary is empty");
    t_schedule.validate();
    for (const auto& p : profiles)
      if (p.m != profiles.front().m) throw DomainError("dictionary profiles must share the bump power");
  }
};

/// L = D_p + Q + 3.
inline int default_seminorm_order(const ExponentFn& p) { return dpdot(p) + 4 + 3; }

/// The first `count` default shapes at order L. Profiles are cached per (L, count).
inline GrandMaximalDictionary make_dictionary(int L, const ScaleSchedule& schedule, int count = 6) {
  const auto shapes = default_profile_shapes();
  if (count < 1 || count > static_cast<int>(shapes.size())) throw DomainError("dictionary size must be in [1, 6]");
  static std::map<std::pair<int, int>, std::vector<Profile>> cache;
  auto it = cache.find({L, count});
  if (it == cache.end()) {
    std::vector<Profile> ps;
    for (int i = 0; i < count; ++i) ps.push_back(make_profile(shapes[i].first, shapes[i].second, L));
    it = cache.emplace(std::make_pair(L, count), std::move(ps)).first;
  }
  GrandMaximalDictionary d{it->second, L, schedule};
  d.validate();
  return d;
}

struct GrandMaximalOptions {
  /// Blocks of the source and output lattice at scale t are at most t / x_ratio
  /// wide in x and t^2 / t_ratio tall in t.
  double x_ratio = 8.0;
  double t_ratio = 64.0;
  /// Evaluate on block x-centers and interpolate along horizontal directions.
  bool interpolate = true;
};

namespace detail {

/// G_j(v) = int_{-1}^{v} s^j (1 - s^2)^m ds as a polynomial in v.
class BumpAntiderivative {
 public:
  BumpAntiderivative(int m, int jmax) : m_(m) {
    for (int j = 0; j <= jmax; ++j) {
      std::vector<double> c(2 * m + j + 2, 0.0);
      double binom = 1.0;
      for (int i = 0; i <= m; ++i) {
        const int k = 2 * i + j + 1;
        const double a = (i % 2 == 0 ? 1.0 : -1.0) * binom / k;
        c[k] += a;
        c[0] -= a * (k % 2 == 0 ? 1.0 : -1.0);
        binom = binom * (m - i) / (i + 1);
      }
      coef_.push_back(std::move(c));
    }
  }

  double operator()(int j, double v) const {
    const auto& c = coef_[j];
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) s = s * v + c[k];
    return s;
  }

  int m() const { return m_; }
  int jmax() const { return static_cast<int>(coef_.size()) - 1; }

 private:
  int m_;
  std::vector<std::vector<double>> coef_;
};

/// Block-averaged copy of a field at pyramid level l (block 2^l cells per axis).
struct Level {
  int nx = 0, nt = 0;
  double hx = 0.0, ht = 0.0;
  std::array<double, 3> lo{};
  std::vector<double> values;
  std::vector<char> column_nonzero;

  double center(int a, int k) const { return lo[a] + (k + 0.5) * (a < 2 ? hx : ht); }
  double at(int a, int b, int k) const { return values[(static_cast<std::size_t>(a) * nx + b) * nt + k]; }

  void mark_columns() {
    column_nonzero.assign(static_cast<std::size_t>(nx) * nx, 0);
    for (int a = 0; a < nx; ++a)
      for (int b = 0; b < nx; ++b)
        for (int k = 0; k < nt; ++k)
          if (at(a, b, k) != 0.0) {
            column_nonzero[static_cast<std::size_t>(a) * nx + b] = 1;
            break;
          }
  }
};

/// Level with blocks of fx x fx x ft cells (fx, ft powers of two dividing the grid).
inline Level block_level(const Field& f, int fx, int ft) {
  const Grid& g = f.grid();
  Level c;
  c.nx = g.nx() / fx;
  c.nt = g.nt() / ft;
  c.hx = fx * g.spec().hx;
  c.ht = ft * g.spec().ht;
  c.lo = {g.lower(0), g.lower(1), g.lower(2)};
  c.values.assign(static_cast<std::size_t>(c.nx) * c.nx * c.nt, 0.0);
  const double w = 1.0 / (static_cast<double>(fx) * fx * ft);
  for (int a = 0; a < g.nx(); ++a)
    for (int b = 0; b < g.nx(); ++b)
      for (int k = 0; k < g.nt(); ++k)
        c.values[(static_cast<std::size_t>(a / fx) * c.nx + b / fx) * c.nt + k / ft] += w * f.at(a, b, k);
  c.mark_columns();
  return c;
}

/// Block levels built on demand, keyed by (fx, ft).
class Pyramid {
 public:
  explicit Pyramid(const Field& f) : f_(f) {}

  const Level& get(int fx, int ft) {
    auto it = levels_.find({fx, ft});
    if (it == levels_.end()) it = levels_.emplace(std::make_pair(fx, ft), block_level(f_, fx, ft)).first;
    return it->second;
  }

  const Field& field() const { return f_; }

 private:
  const Field& f_;
  std::map<std::pair<int, int>, Level> levels_;
};

/// Per-profile data for the inner loop: t-coefficients of P as polynomials in x.
struct ProfileSet {
  std::vector<double> scale;
  std::vector<std::vector<int>> coeff_index;  // [profile][j] -> index into evaluator output, -1 if zero
  PolyEvaluator evaluator;
  BumpAntiderivative G;

  static ProfileSet build(const std::vector<Profile>& profiles) {
    std::vector<Poly> polys;
    std::vector<std::vector<int>> index;
    std::vector<double> scale;
    int jmax = 0;
    for (const auto& p : profiles) {
      const auto cs = p.shape.coefficients_in_t();
      std::vector<int> idx;
      for (const auto& c : cs) {
        if (c.is_zero()) {
          idx.push_back(-1);
        } else {
          idx.push_back(static_cast<int>(polys.size()));
          polys.push_back(c);
        }
      }
      jmax = std::max(jmax, static_cast<int>(cs.size()) - 1);
      index.push_back(std::move(idx));
      scale.push_back(p.scale);
    }
    return ProfileSet{std::move(scale), std::move(index), PolyEvaluator(polys),
                      BumpAntiderivative(profiles.front().m, jmax)};
  }
};

/// (f * phi_t)(z) for every profile of the set, from level data.
inline void smooth_point(const Level& lv, ProfileSet& ps, double t, const Point1& z, std::vector<double>& out,
                         std::vector<double>& coeffs) {
  const int np = static_cast<int>(ps.scale.size());
  const int jmax = ps.G.jmax();
  const int m = ps.G.m();
  out.assign(np, 0.0);
  const double z1 = z.x[0], z2 = z.x[1], zt = z.t;
  const double t2 = t * t;
  const auto col_range = [&](int a, double zc) {
    const double lo = std::ceil((zc - t - lv.lo[a]) / lv.hx - 0.5);
    const double hi = std::floor((zc + t - lv.lo[a]) / lv.hx - 0.5);
    return std::pair<int, int>{static_cast<int>(std::max(0.0, lo)), static_cast<int>(std::min(lv.nx - 1.0, hi))};
  };
  const auto [a0, a1] = col_range(0, z1);
  const auto [b0, b1] = col_range(1, z2);
  double S[16];
  for (int a = a0; a <= a1; ++a) {
    const double w1 = lv.center(0, a);
    const double u1 = (z1 - w1) / t;
    for (int b = b0; b <= b1; ++b) {
      if (!lv.column_nonzero[static_cast<std::size_t>(a) * lv.nx + b]) continue;
      const double w2 = lv.center(1, b);
      const double u2 = (z2 - w2) / t;
      const double uu = u1 * u1 + u2 * u2;
      const double q = uu * uu;
      if (q >= 1.0) continue;
      const double s = std::sqrt(1.0 - q);
      const double reach = 0.25 * s * t2;  // tau half-range of the ball in this column
      const double c0 = zt + 0.5 * (w1 * z2 - w2 * z1);
      // Cells whose w_t range meets (c0 - reach, c0 + reach).
      const int k0 = std::max(0, static_cast<int>(std::floor((c0 - reach - lv.lo[2]) / lv.ht)));
      const int k1 = std::min(lv.nt - 1, static_cast<int>(std::floor((c0 + reach - lv.lo[2]) / lv.ht)));
      if (k1 < k0) continue;
      for (int j = 0; j <= jmax; ++j) S[j] = 0.0;
      const double vscale = 4.0 / (t2 * s);
      // Boundary b of cell k at w_t = lo + k ht maps to v = 4 (c0 - w_t) / (t^2 s).
      const auto vb = [&](int k) { return std::clamp((c0 - (lv.lo[2] + k * lv.ht)) * vscale, -1.0, 1.0); };
      if (lv.ht * vscale <= 0.25) {
        // Cells thin against the profile: two-point Gauss on each clamped v-interval.
        const double g = 0.5773502691896258;
        for (int k = k0; k <= k1; ++k) {
          const double fv = lv.at(a, b, k);
          if (fv == 0.0) continue;
          const double hi = vb(k), lo = vb(k + 1);
          if (hi <= lo) continue;
          const double mid = 0.5 * (hi + lo), half = 0.5 * (hi - lo);
          for (double node : {mid - g * half, mid + g * half}) {
            const double w = ipow(1.0 - node * node, m) * fv * half;
            double vj = 1.0;
            for (int j = 0; j <= jmax; ++j) {
              S[j] += w * vj;
              vj *= node;
            }
          }
        }
      } else {
        double g_hi[16], g_lo[16];
        double v = vb(k0);
        for (int j = 0; j <= jmax; ++j) g_hi[j] = ps.G(j, v);
        for (int k = k0; k <= k1; ++k) {
          v = vb(k + 1);
          for (int j = 0; j <= jmax; ++j) g_lo[j] = ps.G(j, v);
          const double fv = lv.at(a, b, k);
          if (fv != 0.0)
            for (int j = 0; j <= jmax; ++j) S[j] += fv * (g_hi[j] - g_lo[j]);
          for (int j = 0; j <= jmax; ++j) g_hi[j] = g_lo[j];
        }
      }
      ps.evaluator.evaluate(make_point1(u1, u2, 0.0), coeffs);
      const double s2m = std::pow(s, 2 * m);
      for (int p = 0; p < np; ++p) {
        const auto& idx = ps.coeff_index[p];
        double acc = 0.0, sp = 0.25 * s;
        for (std::size_t j = 0; j < idx.size(); ++j) {
          if (idx[j] >= 0) acc += coeffs[idx[j]] * sp * S[j];
          sp *= 0.25 * s;
        }
        out[p] += s2m * acc;
      }
    }
  }
  const double norm = lv.hx * lv.hx / t2;
  for (int p = 0; p < np; ++p) out[p] *= norm * ps.scale[p];
}

/// Linear interpolation weights from coarse centers to fine centers along one axis.
struct AxisMap {
  std::vector<int> i0;
  std::vector<double> w;
};

inline AxisMap axis_map(const std::vector<double>& fine, double lo, double h, int n) {
  AxisMap m;
  for (double c : fine) {
    const double p = (c - lo) / h - 0.5;
    int i = static_cast<int>(std::floor(p));
    double w = p - i;
    if (n == 1) {
      i = 0;
      w = 0.0;
    } else if (i < 0) {
      i = 0;
      w = 0.0;
    } else if (i >= n - 1) {
      i = n - 2;
      w = 1.0;
    }
    m.i0.push_back(i);
    m.w.push_back(w);
  }
  return m;
}

/// Largest power of two f with f * h <= limit that divides n.
inline int block_factor(double h, double limit, int n) {
  int f = 1;
  while (2 * f * h <= limit && n % (2 * f) == 0) f *= 2;
  return f;
}

/// f * phi_t on f's grid for every profile: result[p][cell].
inline std::vector<std::vector<double>> smooth_grid(Pyramid& pyr, ProfileSet& ps, double t,
                                                    const GrandMaximalOptions& opt) {
  const Grid& g = pyr.field().grid();
  const int np = static_cast<int>(ps.scale.size());
  const int fx = block_factor(g.spec().hx, t / opt.x_ratio, g.nx());
  const int ft = block_factor(g.spec().ht, t * t / opt.t_ratio, g.nt());
  const Level& lv = pyr.get(fx, ft);
  // Outputs on the grid's own centers, or on the source level's x-centers.
  const bool coarse_x = opt.interpolate && fx > 1;
  const int nxo = coarse_x ? lv.nx : g.nx(), nt = g.nt();
  const auto& xc0 = g.axis(0);
  const auto& xc1 = g.axis(1);
  const auto& tc = g.axis(2);
  std::vector<double> vals, coeffs;
  std::vector<std::vector<double>> coarse(np, std::vector<double>(static_cast<std::size_t>(nxo) * nxo * nt));
  const auto cidx = [&](int a, int b, int k) { return (static_cast<std::size_t>(a) * nxo + b) * nt + k; };
  for (int a = 0; a < nxo; ++a)
    for (int b = 0; b < nxo; ++b)
      for (int k = 0; k < nt; ++k) {
        const double x1 = coarse_x ? lv.center(0, a) : xc0[a], x2 = coarse_x ? lv.center(1, b) : xc1[b];
        smooth_point(lv, ps, t, make_point1(x1, x2, tc[k]), vals, coeffs);
        for (int p = 0; p < np; ++p) coarse[p][cidx(a, b, k)] = vals[p];
      }
  if (!coarse_x) return coarse;
  // Interpolate along horizontal group directions: the neighbour column at x_c
  // is read at the height of z (x_c - z_x, 0), i.e. t + (z2 x_c1 - z1 x_c2) / 2.
  const AxisMap m0 = axis_map(g.axis(0), lv.lo[0], lv.hx, nxo);
  const AxisMap m1 = axis_map(g.axis(1), lv.lo[1], lv.hx, nxo);
  const double tlo = g.lower(2), ht = g.spec().ht;
  std::vector<std::vector<double>> fine(np, std::vector<double>(g.size()));
  for (int a = 0; a < g.nx(); ++a)
    for (int b = 0; b < g.nx(); ++b) {
      const int A = m0.i0[a], B = m1.i0[b];
      const int As[2] = {A, std::min(A + 1, nxo - 1)}, Bs[2] = {B, std::min(B + 1, nxo - 1)};
      const double wa[2] = {1 - m0.w[a], m0.w[a]}, wb[2] = {1 - m1.w[b], m1.w[b]};
      const double z1 = xc0[a], z2 = xc1[b];
      for (int k = 0; k < nt; ++k) {
        const std::size_t i = g.index(a, b, k);
        for (int p = 0; p < np; ++p) fine[p][i] = 0.0;
        for (int u = 0; u < 2; ++u)
          for (int v = 0; v < 2; ++v) {
            const double w = wa[u] * wb[v];
            if (w == 0.0) continue;
            const double tau = tc[k] + 0.5 * (z2 * lv.center(0, As[u]) - z1 * lv.center(1, Bs[v]));
            const double pos = std::clamp((tau - tlo) / ht - 0.5, 0.0, nt - 1.0);
            const int k0 = std::min(static_cast<int>(pos), nt - 2 < 0 ? 0 : nt - 2);
            const int k1 = std::min(k0 + 1, nt - 1);
            const double wk = pos - k0;
            for (int p = 0; p < np; ++p) {
              const auto& c = coarse[p];
              fine[p][i] += w * ((1 - wk) * c[cidx(As[u], Bs[v], k0)] + wk * c[cidx(As[u], Bs[v], k1)]);
            }
          }
      }
    }
  return fine;
}

}  // namespace detail

/// (f * phi_t)(z) directly from f's cells (no block averaging).
inline double smooth_at(const Field& f, const Profile& phi, double t, const Point1& z) {
  if (!(t > 0.0)) throw DomainError("smoothing scale must be positive");
  detail::Pyramid pyr(f);
  auto ps = detail::ProfileSet::build({phi});
  std::vector<double> out, coeffs;
  detail::smooth_point(pyr.get(1, 1), ps, t, z, out, coeffs);
  return out[0];
}

/// f * phi_t on f's grid through the same pipeline grand_maximal uses.
inline Field smoothed(const Field& f, const Profile& phi, double t, const GrandMaximalOptions& opt = {}) {
  if (!(t > 0.0)) throw DomainError("smoothing scale must be positive");
  detail::Pyramid pyr(f);
  auto ps = detail::ProfileSet::build({phi});
  auto v = detail::smooth_grid(pyr, ps, t, opt);
  return Field(f.grid(), std::move(v[0]));
}

/// max over profiles and scheduled t of |(f * phi_t)(z)| at every cell center.
inline Field grand_maximal(const Field& f, const GrandMaximalDictionary& dict, const GrandMaximalOptions& opt = {}) {
  dict.validate();
  std::vector<double> out(f.size(), 0.0);
  if (f.is_zero()) return Field(f.grid(), std::move(out));
  detail::Pyramid pyr(f);
  auto ps = detail::ProfileSet::build(dict.profiles);
  for (double t : dict.t_schedule.scales()) {
    const auto v = detail::smooth_grid(pyr, ps, t, opt);
    for (const auto& vp : v)
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], std::abs(vp[i]));
  }
  for (double v : out)
    if (!std::isfinite(v)) throw NumericError("grand maximal function is not finite");
  return Field(f.grid(), std::move(out));
}

}  // namespace hha
