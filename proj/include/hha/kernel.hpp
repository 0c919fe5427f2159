#pragma once
// Homogeneous kernels of degree alpha - Q and an empirical check of the
// type-(alpha, N) derivative bounds |X~^I K(z)| <= C rho(z)^(alpha - Q - d(I)).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hha/error.hpp"
#include "hha/group.hpp"

namespace hha {

enum class KernelFamily {
  /// rho^(alpha - Q)
  riesz,
  /// rho^(alpha - Q) (1 + x_1 / (2 rho)): homogeneous, not radial, same ball means as riesz.
  angular,
};

inline std::string to_string(KernelFamily f) { return f == KernelFamily::riesz ? "riesz" : "angular"; }

struct Kernel {
  KernelFamily family = KernelFamily::riesz;
  double alpha = 2.0;
  int Q = 4;
  bool homogeneous = true;

  /// rho^(alpha - Q) from rho^4, with sqrt fast paths for alpha - Q in {-1, -2, -3}.
  double radial_from_fourth(double r4) const {
    const double e = alpha - Q;
    if (e == -2.0) return 1.0 / std::sqrt(r4);
    if (e == -3.0) {
      const double s = std::sqrt(r4);
      return 1.0 / (s * std::sqrt(s));
    }
    if (e == -1.0) return 1.0 / std::sqrt(std::sqrt(r4));
    return std::pow(r4, 0.25 * e);
  }

  /// K(z) for z != e.
  double operator()(const Point1& z) const {
    const double r4 = koranyi_fourth(z);
    if (!(r4 > 0.0)) throw DomainError("kernel evaluated at the identity");
    const double k = radial_from_fourth(r4);
    if (family == KernelFamily::riesz) return k;
    return k * (1.0 + 0.5 * z.x[0] / std::sqrt(std::sqrt(r4)));
  }

  /// Mean of the kernel over the Koranyi ball of measure `cell_volume` centered
  /// at e, i.e. (Q/alpha) |B(e,1)| r^alpha / cell_volume with |B(e,r)| = cell_volume.
  double singular_value(double cell_volume, double unit_ball_measure) const {
    const double r = std::pow(cell_volume / unit_ball_measure, 1.0 / Q);
    return (static_cast<double>(Q) / alpha) * unit_ball_measure * std::pow(r, alpha) / cell_volume;
  }

  std::string label() const { return to_string(family) + "(alpha=" + std::to_string(alpha) + ")"; }
};

inline Kernel make_kernel(KernelFamily family, double alpha, int Q = 4) {
  if (!(alpha > 0.0 && alpha < Q)) throw DomainError("kernel needs 0 < alpha < Q");
  return Kernel{family, alpha, Q, true};
}

template <int N = 1>
Kernel riesz_kernel(double alpha, GroupContext<N> = {}) {
  static_assert(N == 1, "grid kernels are implemented on H^1");
  return make_kernel(KernelFamily::riesz, alpha, GroupContext<N>::Q);
}

inline Kernel angular_kernel(double alpha) { return make_kernel(KernelFamily::angular, alpha, 4); }

struct KernelTypeRow {
  MultiIndex1 index;
  int degree = 0;
  /// sup over samples of |X~^I K| rho^(Q + d(I) - alpha) at step h and h/2.
  double sup_h = 0.0;
  double sup_h2 = 0.0;
  double rel_change = 0.0;
  /// Least-squares slope of log(shell sup) against log(rho); ~0 for a true bound.
  double slope = 0.0;
  bool pass = false;
};

struct KernelTypeReport {
  double alpha = 0.0;
  int N = 0;
  std::vector<KernelTypeRow> rows;
  bool pass = false;

  double max_rel_change() const {
    double m = 0.0;
    for (const auto& r : rows) m = std::max(m, r.rel_change);
    return m;
  }
};

/// `directions` unit-gauge directions times `shells` radii geometric on [r_lo, r_hi].
inline std::vector<Point1> kernel_samples(double r_lo = 0.5, double r_hi = 8.0, int shells = 9, int directions = 24) {
  std::vector<Point1> out;
  for (int s = 0; s < shells; ++s) {
    const double r = r_lo * std::pow(r_hi / r_lo, shells == 1 ? 0.0 : static_cast<double>(s) / (shells - 1));
    for (int d = 0; d < directions; ++d) {
      // Deterministic spread over the gauge sphere: angle in x, latitude in t.
      const double phi = 2.0 * 3.141592653589793 * (d + 0.5) / directions;
      const double lat = -0.9 + 1.8 * ((d * 7) % directions + 0.5) / directions;
      Point1 u = make_point1(std::cos(phi) * std::sqrt(1 - std::abs(lat)), std::sin(phi) * std::sqrt(1 - std::abs(lat)),
                             0.25 * lat);
      u = dilate(1.0 / koranyi_norm(u), u);
      out.push_back(dilate(r, u));
    }
  }
  return out;
}

/// Checks |X~^I K| <= C rho^(alpha - Q - d(I)) for all d(I) <= N on the samples,
/// with right-invariant finite differences of relative step h (step h * rho(z)).
/// A row passes when the constant is finite, changes by < 10% when h is halved,
/// and the shell-wise sup is flat in rho (|slope| <= 0.25).
inline KernelTypeReport validate_kernel_type(const Kernel& k, double alpha, int N, const std::vector<Point1>& samples,
                                             double h = 1e-3) {
  if (N < 0) throw DomainError("kernel type needs N >= 0");
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  for (const auto& z : samples)
    if (koranyi_fourth(z) == 0.0) throw DomainError("kernel sample at the identity");
  const auto f = [&k](const Point1& z) { return k(z); };

  // Group samples into shells of equal rho for the slope fit.
  std::vector<double> shell_rho;
  std::vector<int> shell_of(samples.size());
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const double r = koranyi_norm(samples[s]);
    auto it = std::find_if(shell_rho.begin(), shell_rho.end(), [r](double x) { return std::abs(x - r) <= 1e-9 * r; });
    if (it == shell_rho.end()) {
      shell_rho.push_back(r);
      shell_of[s] = static_cast<int>(shell_rho.size()) - 1;
    } else {
      shell_of[s] = static_cast<int>(it - shell_rho.begin());
    }
  }

  KernelTypeReport rep;
  rep.alpha = alpha;
  rep.N = N;
  rep.pass = true;
  for (const auto& I : multiindices_up_to<1>(N)) {
    KernelTypeRow row;
    row.index = I;
    row.degree = homogeneous_degree(I);
    std::vector<double> shell_sup(shell_rho.size(), 0.0);
    bool finite = true;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto& z = samples[s];
      const double rho = koranyi_norm(z);
      const double w = std::pow(rho, k.Q + row.degree - alpha);
      const double a = std::abs(invariant_derivative<1>(f, I, Side::right, z, h * rho)) * w;
      const double b = std::abs(invariant_derivative<1>(f, I, Side::right, z, 0.5 * h * rho)) * w;
      if (!std::isfinite(a) || !std::isfinite(b)) finite = false;
      row.sup_h = std::max(row.sup_h, a);
      row.sup_h2 = std::max(row.sup_h2, b);
      shell_sup[shell_of[s]] = std::max(shell_sup[shell_of[s]], b);
    }
    row.rel_change = row.sup_h2 > 0.0 ? std::abs(row.sup_h - row.sup_h2) / row.sup_h2 : 0.0;
    if (shell_rho.size() >= 2) {
      double mx = 0, my = 0, n = 0;
      for (std::size_t i = 0; i < shell_rho.size(); ++i)
        if (shell_sup[i] > 0.0) {
          mx += std::log(shell_rho[i]);
          my += std::log(shell_sup[i]);
          n += 1;
        }
      if (n >= 2) {
        mx /= n;
        my /= n;
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < shell_rho.size(); ++i)
          if (shell_sup[i] > 0.0) {
            const double dx = std::log(shell_rho[i]) - mx;
            sxy += dx * (std::log(shell_sup[i]) - my);
            sxx += dx * dx;
          }
        row.slope = sxx > 0.0 ? sxy / sxx : 0.0;
      }
    }
    row.pass = finite && row.rel_change < 0.1 && std::abs(row.slope) <= 0.25;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace hha
