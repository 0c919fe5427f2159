#pragma once
// Modulars and Luxemburg norms of sampled fields, Hoelder/dual pairings, and
// the A-quantity || (sum_j (lambda_j chi_Bj / ||chi_Bj||)^s)^(1/s) ||_p(.).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hha/detail/rng.hpp"
#include "hha/error.hpp"
#include "hha/exponent.hpp"
#include "hha/field.hpp"

namespace hha {

struct NormResult {
  double value = 0.0;
  int iterations = 0;
  double lo = 0.0;
  double hi = 0.0;
  double residual = 0.0;
};

/// Nonzero samples of |f| with the exponent evaluated at their cells. This is
/// everything the modular needs, so norms of sparse data skip the zero cells.
struct ModularData {
  std::vector<double> log_abs;
  std::vector<double> p;
  double cell_volume = 1.0;
  double max_abs = 0.0;

  ModularData() = default;

  ModularData(const Field& f, const ExponentFn& exponent) : cell_volume(f.grid().cell_volume()) {
    const Grid& g = f.grid();
    const bool constant = exponent.is_constant();
    const double p0 = exponent.p_minus();
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double a = std::abs(f[i]);
      if (!std::isfinite(a)) throw NumericError("non-finite field value in a norm computation");
      if (a == 0.0) continue;
      push(a, constant ? p0 : exponent(g.center(i)));
    }
  }

  void push(double abs_value, double exponent_value) {
    log_abs.push_back(std::log(abs_value));
    p.push_back(exponent_value);
    max_abs = std::max(max_abs, abs_value);
  }

  bool empty() const { return log_abs.empty(); }

  /// sum |f/lambda|^p * cellvol with lambda = exp(log_lambda).
  double modular_log(double log_lambda) const {
    double s = 0.0;
    for (std::size_t i = 0; i < log_abs.size(); ++i) s += std::exp(p[i] * (log_abs[i] - log_lambda));
    return s * cell_volume;
  }

  double modular(double lambda) const { return modular_log(std::log(lambda)); }

  double support_volume() const { return static_cast<double>(log_abs.size()) * cell_volume; }

  double p_min() const { return p.empty() ? 1.0 : *std::min_element(p.begin(), p.end()); }
};

inline double modular(const Field& f, const ExponentFn& p, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("modular needs lambda > 0");
  return ModularData(f, p).modular(lambda);
}

/// Bisection in log(lambda) for modular(lambda) = 1.
inline NormResult luxemburg_norm(const ModularData& d, double rel_tol = 1e-10) {
  NormResult r;
  if (d.empty()) return r;
  // Initial guess from the support volume: exact for constant |f| and exponent.
  double lo = std::log(d.max_abs) + std::log(d.support_volume()) / d.p_min();
  double hi = lo;
  int it = 0;
  double m = d.modular_log(lo);
  if (!std::isfinite(m)) throw NumericError("modular is not finite at the initial guess");
  if (m > 1.0) {
    while (m > 1.0) {
      lo = hi;
      hi += std::log(2.0);
      m = d.modular_log(hi);
      if (++it > 4000) throw NumericError("could not bracket the Luxemburg norm");
    }
  } else {
    while (m <= 1.0) {
      hi = lo;
      lo -= std::log(2.0);
      m = d.modular_log(lo);
      if (++it > 4000) throw NumericError("could not bracket the Luxemburg norm");
    }
  }
  // Invariant: modular(lo) > 1 >= modular(hi).
  const double tol = std::log1p(rel_tol);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (d.modular_log(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
    ++it;
  }
  r.value = std::exp(0.5 * (lo + hi));
  r.lo = std::exp(lo);
  r.hi = std::exp(hi);
  r.iterations = it;
  r.residual = std::abs(d.modular_log(0.5 * (lo + hi)) - 1.0);
  if (!std::isfinite(r.value)) throw NumericError("Luxemburg norm is not finite");
  return r;
}

inline NormResult luxemburg_norm(const Field& f, const ExponentFn& p, double rel_tol = 1e-10) {
  return luxemburg_norm(ModularData(f, p), rel_tol);
}

inline double lp_norm(const Field& f, const ExponentFn& p) { return luxemburg_norm(f, p).value; }

/// ||chi_B||_p(.) over the discrete ball (cells with centers in B).
inline double ball_norm(const Ball1& b, const ExponentFn& p, const Grid& grid) {
  const auto cells = ball_cells(b, grid);
  if (cells.empty()) throw DomainError("ball contains no cell centers of the grid");
  ModularData d;
  d.cell_volume = grid.cell_volume();
  for (auto i : cells) d.push(1.0, p.is_constant() ? p.p_minus() : p(grid.center(i)));
  return luxemburg_norm(d).value;
}

struct HolderPair {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// lhs = int |f g|, rhs = 2 ||f||_p ||g||_p'.
inline HolderPair holder_pairing(const Field& f, const Field& g, const ExponentFn& p) {
  if (!(p.p_minus() > 1.0)) throw DomainError("Hoelder pairing needs p_minus > 1");
  require_same_grid(f, g);
  HolderPair h;
  h.lhs = integrate(product(f, g).map([](double v) { return std::abs(v); }));
  if (h.lhs == 0.0 && (f.is_zero() || g.is_zero())) return h;
  h.rhs = 2.0 * lp_norm(f, p) * lp_norm(g, conjugate(p));
  return h;
}

struct DualEstimate {
  double value = 0.0;
  /// value / ||f||_p(.)
  double ratio = 0.0;
  /// Index of the winning trial; 0 is the canonical candidate.
  int best_trial = 0;
};

/// max over unit-norm g in L^p'(.) of int |f g|, searched over the canonical
/// candidate |f/||f|| |^(p-1) and `trial_count` random Gaussian bumps.
inline DualEstimate dual_norm_estimate(const Field& f, const ExponentFn& p, int trial_count, std::uint64_t seed) {
  if (!(p.p_minus() > 1.0)) throw DomainError("dual norm estimate needs p_minus > 1");
  if (trial_count < 1) throw DomainError("dual norm estimate needs at least one trial");
  DualEstimate est;
  if (f.is_zero()) return est;
  const Grid& grid = f.grid();
  const ExponentFn pc = conjugate(p);
  const double norm = lp_norm(f, p);

  const auto pairing = [&](const Field& g) {
    const double gn = lp_norm(g, pc);
    if (gn == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i] * g[i]);
    return s * grid.cell_volume() / gn;
  };

  std::vector<double> canon(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double a = std::abs(f[i]) / norm;
    canon[i] = a == 0.0 ? 0.0 : std::pow(a, p(grid.center(i)) - 1.0);
  }
  est.value = pairing(Field(grid, std::move(canon)));

  detail::Rng rng(seed);
  const GridSpec& s = grid.spec();
  for (int k = 1; k <= trial_count; ++k) {
    const Point1 c = make_point1(s.offset.x[0] + rng.uniform(-0.5, 0.5) * s.Lx,
                                 s.offset.x[1] + rng.uniform(-0.5, 0.5) * s.Lx,
                                 s.offset.t + rng.uniform(-0.5, 0.5) * s.Lt);
    const double w = rng.uniform(2.0 * s.hx, std::max(2.0 * s.hx, s.Lx));
    const Field g = sample(
        [&](const Point1& z) {
          const double r2 = std::sqrt(koranyi_fourth(group_mul(group_inv(c), z)));
          return std::exp(-r2 / (w * w));
        },
        grid);
    const double v = pairing(g);
    if (v > est.value) {
      est.value = v;
      est.best_trial = k;
    }
  }
  est.ratio = est.value / norm;
  return est;
}

/// || (sum_j (lambda_j chi_Bj / ||chi_Bj||_p)^power)^(1/power) ||_p on `grid`.
/// power defaults to p_underline.
inline double script_A(const std::vector<double>& lambdas, const std::vector<Ball1>& balls, const ExponentFn& p,
                       const Grid& grid, std::optional<double> power = std::nullopt) {
  if (lambdas.size() != balls.size()) throw DimensionError("script_A needs one lambda per ball");
  if (balls.empty()) throw DomainError("script_A needs at least one ball");
  const double s = power.value_or(p.p_underline());
  if (!(s > 0.0)) throw DomainError("script_A power must be positive");
  std::vector<double> acc(grid.size(), 0.0);
  for (std::size_t j = 0; j < balls.size(); ++j) {
    if (!(lambdas[j] >= 0.0)) throw DomainError("script_A needs nonnegative lambdas");
    if (lambdas[j] == 0.0) continue;
    const auto cells = ball_cells(balls[j], grid);
    if (cells.empty()) throw DomainError("ball is not resolved by the grid");
    const double w = std::pow(lambdas[j] / ball_norm(balls[j], p, grid), s);
    for (auto i : cells) acc[i] += w;
  }
  ModularData d;
  d.cell_volume = grid.cell_volume();
  const bool constant = p.is_constant();
  for (std::size_t i = 0; i < acc.size(); ++i)
    if (acc[i] > 0.0) d.push(std::pow(acc[i], 1.0 / s), constant ? p.p_minus() : p(grid.center(i)));
  return luxemburg_norm(d).value;
}

}  // namespace hha
