#pragma once
// T_alpha f = f * K_alpha for kernels of type (alpha, N), the Riesz potential,
// and the far-field decay of T_alpha on atoms.

#include <cmath>
#include <optional>
#include <vector>

#include "hha/convolution.hpp"
#include "hha/error.hpp"
#include "hha/field.hpp"
#include "hha/kernel.hpp"

namespace hha {

/// T_alpha f = f * k sampled on `out` (defaults to f's grid).
inline Field apply_T(const Field& f, const Kernel& k, std::optional<Grid> out = std::nullopt) {
  return convolve(f, k, std::move(out));
}

/// R_alpha f = f * rho^(alpha - Q).
inline Field riesz_potential(const Field& f, double alpha, std::optional<Grid> out = std::nullopt) {
  return convolve(f, riesz_kernel(alpha), std::move(out));
}

/// Least-squares slope of log y against log x over the pairs with y > 0.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DimensionError("loglog_slope needs equal lengths");
  double mx = 0, my = 0, n = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      mx += std::log(x[i]);
      my += std::log(y[i]);
      n += 1;
    }
  if (n < 2) throw DomainError("loglog_slope needs two positive points");
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0.0 && y[i] > 0.0) {
      const double dx = std::log(x[i]) - mx;
      sxy += dx * (std::log(y[i]) - my);
      sxx += dx * dx;
    }
  if (sxx == 0.0) throw DomainError("loglog_slope needs distinct abscissae");
  return sxy / sxx;
}

struct DecayFit {
  /// Shell radii rho(c^-1 z) and the max of |T a| over each shell.
  std::vector<double> radii;
  std::vector<double> shell_max;
  double slope = 0.0;
  /// alpha - Q - N.
  double expected = 0.0;
};

/// |f * k| on dyadic gauge shells around `ball` from 2 beta^N delta outward
/// (`shells` radii, ratio 2), max over `directions` unit-gauge directions per
/// shell, and the log-log slope of the shell maxima.
inline DecayFit decay_fit(const Field& f, const Ball1& ball, const Kernel& k, int N, double beta_margin,
                          int shells = 6, int directions = 24) {
  if (!(beta_margin >= 1.0)) throw DomainError("beta_margin must be >= 1");
  if (shells < 2) throw DomainError("decay fit needs at least two shells");
  const double r0 = 2.0 * std::pow(beta_margin, N) * ball.radius;
  const auto dirs = kernel_samples(1.0, 1.0, 1, directions);
  std::vector<Point1> pts;
  DecayFit fit;
  for (int s = 0; s < shells; ++s) {
    const double r = r0 * std::exp2(s);
    fit.radii.push_back(r);
    for (const auto& u : dirs) pts.push_back(group_mul(ball.center, dilate(r, u)));
  }
  const auto v = convolve_points(f, k, pts);
  for (int s = 0; s < shells; ++s) {
    double m = 0.0;
    for (int d = 0; d < directions; ++d) m = std::max(m, std::abs(v[static_cast<std::size_t>(s * directions + d)]));
    if (!std::isfinite(m)) throw NumericError("non-finite T_alpha value in the decay fit");
    fit.shell_max.push_back(m);
  }
  fit.slope = loglog_slope(fit.radii, fit.shell_max);
  fit.expected = k.alpha - k.Q - N;
  return fit;
}

}  // namespace hha
