#pragma once
// Sparse real polynomials in (x1, x2, t) on H^1 with exact invariant derivatives.

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "hha/error.hpp"
#include "hha/group.hpp"

namespace hha {

class Poly {
 public:
  using Exps = std::array<int, 3>;

  Poly() = default;

  static Poly constant(double c) {
    Poly p;
    p.add(Exps{0, 0, 0}, c);
    return p;
  }

  /// The coordinate function z_k (k = 0, 1 for x, 2 for t).
  static Poly coordinate(int k) {
    if (k < 0 || k > 2) throw DimensionError("polynomial coordinate index out of range");
    Exps e{0, 0, 0};
    e[k] = 1;
    Poly p;
    p.add(e, 1.0);
    return p;
  }

  /// rho^4 = (x1^2 + x2^2)^2 + 16 t^2.
  static Poly gauge_fourth() {
    const Poly x1 = coordinate(0), x2 = coordinate(1), t = coordinate(2);
    const Poly s = x1 * x1 + x2 * x2;
    return s * s + 16.0 * (t * t);
  }

  const std::map<Exps, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add(const Exps& e, double c) {
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  Poly operator+(const Poly& o) const {
    Poly r = *this;
    for (const auto& [e, c] : o.terms_) r.add(e, c);
    return r;
  }
  Poly operator-(const Poly& o) const { return *this + (-1.0) * o; }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (const auto& [a, ca] : terms_)
      for (const auto& [b, cb] : o.terms_) r.add(Exps{a[0] + b[0], a[1] + b[1], a[2] + b[2]}, ca * cb);
    return r;
  }
  friend Poly operator*(double s, const Poly& p) {
    Poly r;
    for (const auto& [e, c] : p.terms_) r.add(e, s * c);
    return r;
  }

  Poly pow(int n) const {
    if (n < 0) throw DomainError("polynomial power must be nonnegative");
    Poly r = constant(1.0), b = *this;
    while (n > 0) {
      if (n & 1) r = r * b;
      b = b * b;
      n >>= 1;
    }
    return r;
  }

  Poly partial(int k) const {
    Poly r;
    for (const auto& [e, c] : terms_) {
      if (e[k] == 0) continue;
      Exps d = e;
      --d[k];
      r.add(d, c * e[k]);
    }
    return r;
  }

  /// Left: X1 = d1 + (x2/2) dt, X2 = d2 - (x1/2) dt, X3 = dt; right flips the dt terms.
  Poly invariant(int k, Side side) const {
    const double sgn = side == Side::left ? 1.0 : -1.0;
    if (k == 2) return partial(2);
    const Poly dt = partial(2);
    if (k == 0) return partial(0) + (0.5 * sgn) * (coordinate(1) * dt);
    if (k == 1) return partial(1) + (-0.5 * sgn) * (coordinate(0) * dt);
    throw DimensionError("invariant field index out of range");
  }

  /// X^I = X1^i1 X2^i2 X3^i3 (X1 outermost).
  Poly apply(const MultiIndex1& I, Side side) const {
    Poly r = *this;
    for (int k = 2; k >= 0; --k)
      for (int j = 0; j < I.i[k]; ++j) r = r.invariant(k, side);
    return r;
  }

  double operator()(const Point1& z) const {
    double s = 0.0;
    for (const auto& [e, c] : terms_) s += c * ipow(z.x[0], e[0]) * ipow(z.x[1], e[1]) * ipow(z.t, e[2]);
    return s;
  }

  int degree(int k) const {
    int d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, e[k]);
    return d;
  }

  /// Coefficients c_j(x1, x2) of t^j, j = 0..degree(2).
  std::vector<Poly> coefficients_in_t() const {
    std::vector<Poly> out(degree(2) + 1);
    for (const auto& [e, c] : terms_) out[e[2]].add(Exps{e[0], e[1], 0}, c);
    return out;
  }

 private:
  std::map<Exps, double> terms_;
};

/// Evaluates many polynomials at one point from shared power tables.
class PolyEvaluator {
 public:
  explicit PolyEvaluator(const std::vector<Poly>& polys) {
    for (const auto& p : polys) {
      Flat f;
      for (const auto& [e, c] : p.terms()) {
        f.e.push_back(e);
        f.c.push_back(c);
        for (int k = 0; k < 3; ++k) max_[k] = std::max(max_[k], e[k]);
      }
      flat_.push_back(std::move(f));
    }
    for (int k = 0; k < 3; ++k) pw_[k].resize(max_[k] + 1);
  }

  /// Writes p_i(z) into out[i].
  void evaluate(const Point1& z, std::vector<double>& out) {
    const double v[3] = {z.x[0], z.x[1], z.t};
    for (int k = 0; k < 3; ++k) {
      pw_[k][0] = 1.0;
      for (int j = 1; j <= max_[k]; ++j) pw_[k][j] = pw_[k][j - 1] * v[k];
    }
    out.resize(flat_.size());
    for (std::size_t i = 0; i < flat_.size(); ++i) {
      const Flat& f = flat_[i];
      double s = 0.0;
      for (std::size_t j = 0; j < f.c.size(); ++j) s += f.c[j] * pw_[0][f.e[j][0]] * pw_[1][f.e[j][1]] * pw_[2][f.e[j][2]];
      out[i] = s;
    }
  }

 private:
  struct Flat {
    std::vector<Poly::Exps> e;
    std::vector<double> c;
  };
  std::vector<Flat> flat_;
  std::array<int, 3> max_{0, 0, 0};
  std::array<std::vector<double>, 3> pw_;
};

}  // namespace hha
