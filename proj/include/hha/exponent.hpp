#pragma once
// Variable exponents p(.) with declared bounds and empirical log-Hoelder estimates.
//
// Builders:
//   constant       p(z) = p0
//   log_decay      p(z) = p_inf + A / log(e + rho(z))
//   gaussian_bump  p(z) = a + b exp(-rho(z)^2 / s^2)
// plus pointwise derivations (conjugate, Sobolev, division by a constant,
// left translation) that carry their bounds along.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hha/detail/rng.hpp"
#include "hha/error.hpp"
#include "hha/group.hpp"

namespace hha {

enum class ExponentKind { constant, log_decay, gaussian_bump, pointwise_derived };
enum class Derivation { none, conjugate, sobolev, scaled, translated };

inline std::string to_string(ExponentKind k) {
  switch (k) {
    case ExponentKind::constant: return "constant";
    case ExponentKind::log_decay: return "log_decay";
    case ExponentKind::gaussian_bump: return "gaussian_bump";
    case ExponentKind::pointwise_derived: return "pointwise_derived";
  }
  return "?";
}

template <int N>
class Exponent {
 public:
  /// Defaults to the constant exponent 2.
  Exponent() : Exponent(make_constant(2.0)) {}

  double operator()(const Point<N>& z) const { return eval(*node_, z); }

  ExponentKind kind() const { return node_->kind; }
  Derivation derivation() const { return node_->derivation; }
  const std::vector<double>& params() const { return node_->params; }
  double p_minus() const { return node_->p_minus; }
  double p_plus() const { return node_->p_plus; }
  double p_underline() const { return std::min(node_->p_minus, 1.0); }
  double p_inf() const { return node_->p_inf; }
  bool is_constant() const { return node_->p_minus == node_->p_plus; }

  /// Short human-readable label, e.g. "gaussian_bump(1.5,0.5,1)".
  std::string label() const { return label(*node_); }

  nlohmann::json to_json() const { return to_json(*node_); }

  static Exponent from_json(const nlohmann::json& j);

  static Exponent make_constant(double p0) {
    if (!(p0 > 0.0) || !std::isfinite(p0)) throw DomainError("constant exponent must be positive and finite");
    return Exponent(leaf(ExponentKind::constant, {p0}, p0, p0, p0));
  }

  static Exponent make_log_decay(double p_inf, double A) {
    if (!(p_inf > 0.0) || !(A >= 0.0) || !std::isfinite(p_inf + A))
      throw DomainError("log_decay needs p_inf > 0 and finite A >= 0");
    return Exponent(leaf(ExponentKind::log_decay, {p_inf, A}, p_inf, p_inf + A, p_inf));
  }

  static Exponent make_gaussian_bump(double a, double b, double s) {
    if (!(a > 0.0) || !(a + b > 0.0) || !(s > 0.0) || !std::isfinite(a + b + s))
      throw DomainError("gaussian_bump needs a > 0, a + b > 0, s > 0");
    return Exponent(leaf(ExponentKind::gaussian_bump, {a, b, s}, std::min(a, a + b), std::max(a, a + b), a));
  }

  Exponent conjugate() const {
    if (!(p_minus() > 1.0)) throw DomainError("conjugate exponent needs p_minus > 1");
    const auto c = [](double p) { return std::isinf(p) ? 1.0 : p / (p - 1.0); };
    return derived(Derivation::conjugate, {}, c(p_plus()), c(p_minus()), c(p_inf()));
  }

  /// 1/q = 1/p - alpha/Q.
  Exponent sobolev(double alpha, int Q) const {
    if (!(alpha > 0.0 && alpha < Q)) throw DomainError("Sobolev exponent needs 0 < alpha < Q");
    if (!(p_plus() < Q / alpha)) throw DomainError("Sobolev exponent needs p_plus < Q/alpha");
    const auto q = [&](double p) { return 1.0 / (1.0 / p - alpha / Q); };
    return derived(Derivation::sobolev, {alpha, static_cast<double>(Q)}, q(p_minus()), q(p_plus()), q(p_inf()));
  }

  /// z -> p(z) / s.
  Exponent scaled(double s) const {
    if (!(s > 0.0)) throw DomainError("exponent scale must be positive");
    return derived(Derivation::scaled, {s}, p_minus() / s, p_plus() / s, p_inf() / s);
  }

  /// u -> p(z0 . u).
  Exponent translated(const Point<N>& z0) const {
    if (z0 == Point<N>::identity()) return *this;
    Exponent e = derived(Derivation::translated, {}, p_minus(), p_plus(), p_inf());
    auto node = std::make_shared<Node>(*e.node_);
    node->z0 = z0;
    return Exponent(node);
  }

  /// The exponent this one was derived from (itself for builder outputs).
  Exponent base() const { return node_->base ? Exponent(node_->base) : *this; }

 private:
  struct Node {
    ExponentKind kind = ExponentKind::constant;
    Derivation derivation = Derivation::none;
    std::vector<double> params;
    std::shared_ptr<const Node> base;
    Point<N> z0{};
    double p_minus = 2, p_plus = 2, p_inf = 2;
  };

  explicit Exponent(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> leaf(ExponentKind k, std::vector<double> params, double lo, double hi,
                                          double inf) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->params = std::move(params);
    n->p_minus = lo;
    n->p_plus = hi;
    n->p_inf = inf;
    return n;
  }

  Exponent derived(Derivation d, std::vector<double> params, double lo, double hi, double inf) const {
    auto n = std::make_shared<Node>();
    n->kind = ExponentKind::pointwise_derived;
    n->derivation = d;
    n->params = std::move(params);
    n->base = node_;
    n->p_minus = lo;
    n->p_plus = hi;
    n->p_inf = inf;
    return Exponent(n);
  }

  static double eval(const Node& n, const Point<N>& z) {
    switch (n.kind) {
      case ExponentKind::constant:
        return n.params[0];
      case ExponentKind::log_decay:
        return n.params[0] + n.params[1] / std::log(std::numbers::e + koranyi_norm(z));
      case ExponentKind::gaussian_bump: {
        double x2 = 0.0;
        for (double v : z.x) x2 += v * v;
        const double rho2 = std::sqrt(x2 * x2 + 16.0 * z.t * z.t);
        return n.params[0] + n.params[1] * std::exp(-rho2 / (n.params[2] * n.params[2]));
      }
      case ExponentKind::pointwise_derived:
        break;
    }
    switch (n.derivation) {
      case Derivation::conjugate: {
        const double p = eval(*n.base, z);
        return p / (p - 1.0);
      }
      case Derivation::sobolev: {
        const double p = eval(*n.base, z);
        return 1.0 / (1.0 / p - n.params[0] / n.params[1]);
      }
      case Derivation::scaled:
        return eval(*n.base, z) / n.params[0];
      case Derivation::translated:
        return eval(*n.base, group_mul(n.z0, z));
      case Derivation::none:
        break;
    }
    throw DomainError("malformed exponent");
  }

  static std::string num(double v) {
    std::string s = nlohmann::json(v).dump();
    return s;
  }

  static std::string label(const Node& n) {
    std::string args;
    for (std::size_t i = 0; i < n.params.size(); ++i) args += (i ? "," : "") + num(n.params[i]);
    switch (n.derivation) {
      case Derivation::none: return to_string(n.kind) + "(" + args + ")";
      case Derivation::conjugate: return "conjugate(" + label(*n.base) + ")";
      case Derivation::sobolev: return "sobolev(" + label(*n.base) + ",alpha=" + num(n.params[0]) + ")";
      case Derivation::scaled: return "scaled(" + label(*n.base) + ",1/" + num(n.params[0]) + ")";
      case Derivation::translated: return "translated(" + label(*n.base) + ")";
    }
    return "?";
  }

  static nlohmann::json point_json(const Point<N>& p) {
    nlohmann::json a = nlohmann::json::array();
    for (double v : p.x) a.push_back(v);
    a.push_back(p.t);
    return a;
  }

  static nlohmann::json to_json(const Node& n) {
    using nlohmann::json;
    switch (n.derivation) {
      case Derivation::none:
        switch (n.kind) {
          case ExponentKind::constant: return {{"kind", "constant"}, {"params", {{"p", n.params[0]}}}};
          case ExponentKind::log_decay:
            return {{"kind", "log_decay"}, {"params", {{"p_inf", n.params[0]}, {"A", n.params[1]}}}};
          case ExponentKind::gaussian_bump:
            return {{"kind", "gaussian_bump"},
                    {"params", {{"a", n.params[0]}, {"b", n.params[1]}, {"s", n.params[2]}}}};
          default: break;
        }
        break;
      case Derivation::conjugate:
        return {{"kind", "pointwise_derived"}, {"params", {{"op", "conjugate"}, {"base", to_json(*n.base)}}}};
      case Derivation::sobolev:
        return {{"kind", "pointwise_derived"},
                {"params", {{"op", "sobolev"}, {"alpha", n.params[0]}, {"base", to_json(*n.base)}}}};
      case Derivation::scaled:
        return {{"kind", "pointwise_derived"},
                {"params", {{"op", "scaled"}, {"s", n.params[0]}, {"base", to_json(*n.base)}}}};
      case Derivation::translated:
        return {{"kind", "pointwise_derived"},
                {"params", {{"op", "translated"}, {"z0", point_json(n.z0)}, {"base", to_json(*n.base)}}}};
    }
    throw DomainError("malformed exponent");
  }

  std::shared_ptr<const Node> node_;
};

using ExponentFn = Exponent<1>;

template <int N>
Exponent<N> Exponent<N>::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind")) throw DomainError("exponent spec needs a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  const nlohmann::json params = j.value("params", nlohmann::json::object());
  const auto get = [&](const char* key) {
    if (!params.contains(key)) throw DomainError("exponent '" + kind + "' needs parameter '" + key + "'");
    return params.at(key).get<double>();
  };
  if (kind == "constant") return make_constant(get("p"));
  if (kind == "log_decay") return make_log_decay(get("p_inf"), get("A"));
  if (kind == "gaussian_bump") return make_gaussian_bump(get("a"), get("b"), get("s"));
  if (kind == "pointwise_derived") {
    const std::string op = params.at("op").get<std::string>();
    const Exponent b = from_json(params.at("base"));
    if (op == "conjugate") return b.conjugate();
    if (op == "sobolev") return b.sobolev(get("alpha"), GroupContext<N>::Q);
    if (op == "scaled") return b.scaled(get("s"));
    if (op == "translated") {
      const auto& a = params.at("z0");
      if (!a.is_array() || a.size() != static_cast<std::size_t>(2 * N + 1))
        throw DimensionError("translation point has the wrong dimension");
      Point<N> z;
      for (int k = 0; k < 2 * N + 1; ++k) z.coord(k) = a[k].get<double>();
      return b.translated(z);
    }
    throw DomainError("unknown exponent derivation '" + op + "'");
  }
  throw DomainError("unknown exponent kind '" + kind + "'");
}

/// make_exponent("gaussian_bump", {1.5, 0.5, 1}) etc.
template <int N = 1>
Exponent<N> make_exponent(ExponentKind kind, const std::vector<double>& params) {
  const auto need = [&](std::size_t n) {
    if (params.size() != n) throw DomainError(to_string(kind) + " takes " + std::to_string(n) + " parameters");
  };
  switch (kind) {
    case ExponentKind::constant: need(1); return Exponent<N>::make_constant(params[0]);
    case ExponentKind::log_decay: need(2); return Exponent<N>::make_log_decay(params[0], params[1]);
    case ExponentKind::gaussian_bump: need(3); return Exponent<N>::make_gaussian_bump(params[0], params[1], params[2]);
    case ExponentKind::pointwise_derived: break;
  }
  throw DomainError("derived exponents are built with conjugate/sobolev_exponent/scaled/translated");
}

template <int N>
Exponent<N> conjugate(const Exponent<N>& p) {
  return p.conjugate();
}

template <int N>
Exponent<N> sobolev_exponent(const Exponent<N>& p, double alpha, GroupContext<N> = {}) {
  return p.sobolev(alpha, GroupContext<N>::Q);
}

/// Minimal k >= 0 with (2n + k + 3) p_minus > 2n + 2.
template <int N>
int dpdot(double p_minus, GroupContext<N> = {}) {
  if (!(p_minus > 0.0)) throw DomainError("p_minus must be positive");
  int k = 0;
  while (!((2 * N + k + 3) * p_minus > 2 * N + 2)) ++k;
  return k;
}

template <int N>
int dpdot(const Exponent<N>& p, GroupContext<N> ctx = {}) {
  return dpdot<N>(p.p_minus(), ctx);
}

struct LogHolderEstimate {
  double C_local = 0.0;
  double C_inf = 0.0;
};

template <int N>
using PairSampler = std::function<std::pair<Point<N>, Point<N>>(detail::Rng&)>;

/// Pairs (z, w) with z spread log-uniformly in rho over [1e-3, 1e6] and
/// w = z . v, rho(v) log-uniform in [1e-8, 1/2], so both the local modulus and
/// the behaviour at infinity are probed.
template <int N>
PairSampler<N> default_pair_sampler() {
  return [](detail::Rng& rng) {
    const auto direction = [&rng]() {
      Point<N> u;
      for (auto& c : u.x) c = rng.normal();
      u.t = rng.normal();
      return dilate(1.0 / koranyi_norm(u), u);
    };
    const Point<N> z = dilate(std::exp(rng.uniform(std::log(1e-3), std::log(1e6))), direction());
    const Point<N> v = dilate(std::exp(rng.uniform(std::log(1e-8), std::log(0.5))), direction());
    return std::make_pair(z, group_mul(z, v));
  };
}

/// Brute-force estimates of the local and at-infinity log-Hoelder constants of f.
template <int N, class F>
LogHolderEstimate log_holder_estimate(const F& f, double f_inf, const PairSampler<N>& sampler, int trials,
                                      std::uint64_t seed = 1) {
  if (trials < 1) throw DomainError("log_holder_estimate needs at least one trial");
  detail::Rng rng(seed);
  LogHolderEstimate est;
  for (int k = 0; k < trials; ++k) {
    const auto [z, w] = sampler(rng);
    const double fz = f(z);
    const double d = gauge_distance(z, w);
    if (d > 0.0 && d <= 0.5) est.C_local = std::max(est.C_local, std::abs(fz - f(w)) * -std::log(d));
    est.C_inf = std::max(est.C_inf, std::abs(fz - f_inf) * std::log(std::numbers::e + koranyi_norm(z)));
  }
  return est;
}

template <int N>
LogHolderEstimate log_holder_estimate(const Exponent<N>& p, const PairSampler<N>& sampler, int trials,
                                      std::uint64_t seed = 1) {
  return log_holder_estimate<N>(p, p.p_inf(), sampler, trials, seed);
}

template <int N>
LogHolderEstimate log_holder_estimate(const Exponent<N>& p, int trials, std::uint64_t seed = 1) {
  return log_holder_estimate<N>(p, default_pair_sampler<N>(), trials, seed);
}

/// Number of sampled points where p leaves [p_minus, p_plus] (relative slack 1e-12).
template <int N>
int bounds_violations(const Exponent<N>& p, int trials, std::uint64_t seed = 1) {
  detail::Rng rng(seed);
  const auto sampler = default_pair_sampler<N>();
  int bad = 0;
  for (int k = 0; k < trials; ++k) {
    const auto [z, w] = sampler(rng);
    for (const auto& u : {z, w, dilate(1e-3, z)}) {
      const double v = p(u);
      if (!(v >= p.p_minus() * (1 - 1e-12) && v <= p.p_plus() * (1 + 1e-12))) ++bad;
    }
  }
  return bad;
}

}  // namespace hha
