#pragma once
// (p(.), p0, D)-atoms: construction, axiom checks, left translation, finite sums.
//
// An atom on B(c, delta) is a(z) = factor * w(u) q(u) with u = delta^-1 (c^-1 z),
// w = (1 - rho(u)^4)^m and q a polynomial in u. q starts as a seed-random
// polynomial of homogeneous degree <= D + 2; the weighted least-squares fit of
// q by polynomials of degree <= D (weight w over the discrete ball) is removed,
// which zeroes every discrete moment of degree <= D. Left translation preserves
// the filtration by homogeneous degree, so the recentred basis spans the same
// space as the global monomials z^I.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hha/detail/rng.hpp"
#include "hha/error.hpp"
#include "hha/exponent.hpp"
#include "hha/field.hpp"
#include "hha/field_io.hpp"
#include "hha/luxemburg.hpp"
#include "hha/polynomial.hpp"

namespace hha {

struct DegenerateAtomError : NumericError {
  std::uint64_t next_seed;
  DegenerateAtomError(std::uint64_t seed)
      : NumericError("moment projection annihilates the bump for seed " + std::to_string(seed) + "; retry with seed " +
                     std::to_string(seed + 1)),
        next_seed(seed + 1) {}
};

struct AtomNormalization {
  /// Scaling applied to the projected bump.
  double factor = 1.0;
  /// The a2 bound |B|^(1/p0) / ||chi_B||_p on the grid.
  double target = 0.0;
  double ball_measure = 0.0;
  double ball_norm = 0.0;
};

struct Atom {
  Field field;
  Ball1 ball;
  double p0 = 2.0;
  int D = 0;
  ExponentFn exponent;
  std::uint64_t seed = 0;
  AtomNormalization normalization;
  /// Projected polynomial q in the normalized coordinates u.
  Poly shape;
  int bump_power = 8;

  /// The atom as a function on H^1 (zero outside the open ball).
  double operator()(const Point1& z) const {
    const Point1 u = dilate(1.0 / ball.radius, group_mul(group_inv(ball.center), z));
    const double s = 1.0 - koranyi_fourth(u);
    if (!(s > 0.0)) return 0.0;
    return normalization.factor * (ipow(s, bump_power) * shape(u));
  }
};

/// Grid around `b` with `cells_across` cells over the x-diameter and half as
/// many over the t-extent of B(e, delta), plus a two-cell margin.
inline GridSpec atom_grid_spec(const Ball1& b, int cells_across = 16) {
  if (cells_across < 8) throw DomainError("atom grids need at least 8 cells across");
  const double d = b.radius;
  const double hx = 2.0 * d / cells_across, ht = 0.5 * d * d / (0.5 * cells_across);
  const auto [lo, hi] = ball_bounding_box(b);
  GridSpec s;
  s.hx = hx;
  s.ht = ht;
  s.Lx = 0.5 * std::max(hi[0] - lo[0], hi[1] - lo[1]) + 2.0 * hx;
  s.Lt = 0.5 * (hi[2] - lo[2]) + 2.0 * ht;
  s.offset = make_point1(0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2]));
  return s;
}

namespace detail {

inline void require_resolved(const Ball1& b, const Grid& g) {
  if (!grid_holds_ball(g, b)) throw DomainError("atom ball does not fit in the grid with a one-cell margin");
  if (2.0 * b.radius / g.spec().hx < 8.0 - 1e-9 || 0.5 * b.radius * b.radius / g.spec().ht < 8.0 - 1e-9)
    throw DomainError("atom ball is not resolved (needs >= 8 cells across in x and t)");
}

inline double lp_const(const std::vector<double>& v, double p, double cv) {
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x), p);
  return std::pow(s * cv, 1.0 / p);
}

struct BallSamples {
  std::vector<std::size_t> cells;
  std::vector<Point1> u;
  std::vector<double> w;
};

inline BallSamples ball_samples(const Ball1& b, const Grid& g, int m) {
  BallSamples s;
  s.cells = ball_cells(b, g);
  const Point1 ci = group_inv(b.center);
  for (auto i : s.cells) {
    const Point1 u = dilate(1.0 / b.radius, group_mul(ci, g.center(i)));
    s.u.push_back(u);
    s.w.push_back(ipow(std::max(0.0, 1.0 - koranyi_fourth(u)), m));
  }
  return s;
}

/// Coefficients c minimizing sum_i w_i (v_i / w_i - sum_I c_I u_i^I)^2 over degree <= D.
inline Eigen::VectorXd moment_fit(const BallSamples& s, const std::vector<double>& v, int D) {
  const auto basis = multiindices_up_to<1>(D);
  const auto k = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd phi(k);
  for (std::size_t i = 0; i < s.cells.size(); ++i) {
    for (Eigen::Index a = 0; a < k; ++a) phi[a] = monomial(basis[a], s.u[i]);
    G.noalias() += s.w[i] * phi * phi.transpose();
    rhs.noalias() += v[i] * phi;
  }
  return G.ldlt().solve(rhs);
}

inline Poly basis_poly(const Eigen::VectorXd& c, int D) {
  const auto basis = multiindices_up_to<1>(D);
  Poly p;
  for (std::size_t a = 0; a < basis.size(); ++a)
    p.add(Poly::Exps{basis[a].i[0], basis[a].i[1], basis[a].i[2]}, c[static_cast<Eigen::Index>(a)]);
  return p;
}

inline Atom atom_from_shape(const Ball1& ball, const ExponentFn& p, double p0, int D, std::uint64_t seed,
                            const Grid& grid, const Poly& raw, int bump_power) {
  if (!(p0 > 1.0)) throw DomainError("atoms need p0 > 1");
  if (D < 0) throw DomainError("atoms need D >= 0");
  require_resolved(ball, grid);
  const BallSamples s = ball_samples(ball, grid, bump_power);
  std::vector<double> psi(s.cells.size());
  double psi2 = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    psi[i] = s.w[i] * raw(s.u[i]);
    psi2 += psi[i] * psi[i];
  }
  const Poly shape = raw - basis_poly(moment_fit(s, psi, D), D);
  std::vector<double> a(psi.size());
  double a2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = s.w[i] * shape(s.u[i]);
    a2 += a[i] * a[i];
  }
  if (!(a2 > 1e-16 * psi2)) throw DegenerateAtomError(seed);

  Atom atom;
  atom.ball = ball;
  atom.p0 = p0;
  atom.D = D;
  atom.exponent = p;
  atom.seed = seed;
  atom.shape = shape;
  atom.bump_power = bump_power;
  auto& nm = atom.normalization;
  nm.ball_measure = static_cast<double>(s.cells.size()) * grid.cell_volume();
  nm.ball_norm = ball_norm(ball, p, grid);
  nm.target = std::pow(nm.ball_measure, 1.0 / p0) / nm.ball_norm;
  nm.factor = nm.target / lp_const(a, p0, grid.cell_volume());
  std::vector<double> values(grid.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) values[s.cells[i]] = nm.factor * a[i];
  atom.field = Field(grid, std::move(values), ball);
  return atom;
}

}  // namespace detail

/// Seed-random polynomial of homogeneous degree <= max_degree with standard
/// normal coefficients in the normalized coordinates.
inline Poly random_shape(std::uint64_t seed, int max_degree) {
  detail::Rng rng(seed);
  Poly p;
  for (const auto& I : multiindices_up_to<1>(max_degree)) p.add(Poly::Exps{I.i[0], I.i[1], I.i[2]}, rng.normal());
  return p;
}

/// A (p, p0, D)-atom on `ball` with the a2 bound met with equality.
inline Atom make_atom(const Ball1& ball, const ExponentFn& p, double p0, int D, std::uint64_t seed, const Grid& grid,
                      int bump_power = 8) {
  return detail::atom_from_shape(ball, p, p0, D, seed, grid, random_shape(seed, D + 2), bump_power);
}

/// Same as make_atom with an explicit starting polynomial (in normalized coordinates).
inline Atom make_atom_from_shape(const Ball1& ball, const ExponentFn& p, double p0, int D, const Poly& shape,
                                 const Grid& grid, int bump_power = 8) {
  return detail::atom_from_shape(ball, p, p0, D, 0, grid, shape, bump_power);
}

/// Tries seed, seed + 1, ... until the projection leaves a nonzero bump.
/// `skipped` receives the degenerate seeds.
inline Atom make_atom_retry(const Ball1& ball, const ExponentFn& p, double p0, int D, std::uint64_t seed,
                            const Grid& grid, std::vector<std::uint64_t>* skipped = nullptr, int attempts = 16) {
  for (int k = 0; k < attempts; ++k) {
    try {
      return make_atom(ball, p, p0, D, seed + static_cast<std::uint64_t>(k), grid);
    } catch (const DegenerateAtomError&) {
      if (skipped) skipped->push_back(seed + static_cast<std::uint64_t>(k));
    }
  }
  throw NumericError("no nondegenerate atom within " + std::to_string(attempts) + " seeds");
}

/// f minus its weighted least-squares fit (weight (1 - rho(u)^4)^m on the discrete
/// ball) by polynomials of degree <= D; values outside the ball are kept.
inline Field project_moments(const Field& f, const Ball1& ball, int D, int bump_power = 8) {
  const detail::BallSamples s = detail::ball_samples(ball, f.grid(), bump_power);
  std::vector<double> v(s.cells.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f[s.cells[i]];
  const Poly fit = detail::basis_poly(detail::moment_fit(s, v, D), D);
  std::vector<double> out(f.values());
  for (std::size_t i = 0; i < v.size(); ++i) out[s.cells[i]] = v[i] - s.w[i] * fit(s.u[i]);
  return Field(f.grid(), std::move(out), f.support_hint());
}

struct AtomTolerances {
  /// |int f z^I| <= moment * ||f||_1 * max_B |z^I|.
  double moment = 1e-10;
  /// ||f||_p0 <= (1 + size) * |B|^(1/p0) / ||chi_B||_p.
  double size = 1e-8;
};

struct MomentCheck {
  MultiIndex1 index;
  /// |int f z^I| / (||f||_1 max_B |z^I|).
  double slack = 0.0;
};

struct AtomReport {
  /// a1: max |f| over cells outside the ball.
  double support_leak = 0.0;
  bool a1 = false;
  /// a2: ||f||_p0 and the bound.
  double size = 0.0;
  double size_bound = 0.0;
  bool a2 = false;
  /// a3: per-monomial normalized moments.
  std::vector<MomentCheck> moments;
  double moment_slack = 0.0;
  bool a3 = false;

  bool pass() const { return a1 && a2 && a3; }
  double size_ratio() const { return size_bound > 0.0 ? size / size_bound : 0.0; }
};

inline AtomReport validate_atom(const Field& f, const Ball1& ball, const ExponentFn& p, double p0, int D,
                                const AtomTolerances& tol = {}) {
  const Grid& g = f.grid();
  AtomReport r;
  const auto cells = ball_cells(ball, g);
  std::vector<char> inside(g.size(), 0);
  for (auto i : cells) inside[i] = 1;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!inside[i]) r.support_leak = std::max(r.support_leak, std::abs(f[i]));
  r.a1 = r.support_leak == 0.0;

  const double cv = g.cell_volume();
  std::vector<double> vals(f.values());
  r.size = detail::lp_const(vals, p0, cv);
  if (cells.empty()) {
    r.size_bound = 0.0;
    r.a2 = r.size == 0.0;
  } else {
    r.size_bound = std::pow(static_cast<double>(cells.size()) * cv, 1.0 / p0) / ball_norm(ball, p, g);
    r.a2 = r.size <= (1.0 + tol.size) * r.size_bound;
  }

  double l1 = 0.0;
  for (double v : vals) l1 += std::abs(v);
  l1 *= cv;
  r.a3 = true;
  for (const auto& I : multiindices_up_to<1>(D)) {
    std::vector<double> terms;
    double mx = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (f[i] == 0.0 && !inside[i]) continue;
      const double m = monomial(I, g.center(i));
      if (inside[i]) mx = std::max(mx, std::abs(m));
      if (f[i] != 0.0) terms.push_back(f[i] * m * cv);
    }
    const double integral = detail::ordered_sum(terms.begin(), terms.end());
    MomentCheck mc{I, 0.0};
    const double scale = l1 * mx;
    mc.slack = scale > 0.0 ? std::abs(integral) / scale : (integral == 0.0 ? 0.0 : INFINITY);
    r.moment_slack = std::max(r.moment_slack, mc.slack);
    r.a3 = r.a3 && mc.slack <= tol.moment;
    r.moments.push_back(mc);
  }
  return r;
}

inline AtomReport validate_atom(const Atom& a, const AtomTolerances& tol = {}) {
  return validate_atom(a.field, a.ball, a.exponent, a.p0, a.D, tol);
}

/// u -> a(z0 u), resampled from the atom's closed form onto `grid` (default: the
/// atom's grid moved by z0^-1). The result is declared on B(z0^-1 c, delta) with
/// the exponent u -> p(z0 u), for which it is again an atom with the a2 bound
/// met with equality.
inline Atom translate_atom(const Atom& a, const Point1& z0, std::optional<Grid> grid = std::nullopt) {
  if (z0 == Point1::identity() && !grid) return a;
  const Point1 zi = group_inv(z0);
  const Ball1 ball(group_mul(zi, a.ball.center), a.ball.radius);
  GridSpec spec = a.field.spec();
  spec.offset = group_mul(zi, spec.offset);
  const Grid g = grid.value_or(Grid(spec));
  if (!grid_holds_ball(g, ball)) throw DomainError("translated atom support escapes the grid box");
  std::vector<double> v(g.size(), 0.0);
  for (auto i : ball_cells(ball, g)) v[i] = a(group_mul(z0, g.center(i)));
  Atom out = a;
  out.ball = ball;
  out.exponent = a.exponent.translated(z0);
  out.field = Field(g, std::move(v), ball);
  return out;
}

/// Tolerances for re-validating `translated` = translate_atom(original, .):
/// moments and norms to `resample`, and the a2 slack widened by the change of
/// the discrete bound |B|_grid^(1/p0) / ||chi_B||_p between the two grids.
inline AtomTolerances translated_tolerances(const Atom& original, const Atom& translated, double resample = 1e-6) {
  const double b0 = validate_atom(original).size_bound;
  const double b1 = validate_atom(translated).size_bound;
  return {resample, resample + std::abs(b0 / b1 - 1.0)};
}

/// sum_j lambda_j a_j on the atoms' common grid.
inline Field synthesize(const std::vector<double>& lambdas, const std::vector<Atom>& atoms) {
  if (lambdas.size() != atoms.size()) throw DimensionError("synthesize needs one lambda per atom");
  if (atoms.empty()) throw DomainError("synthesize needs at least one atom");
  const Grid& g = atoms.front().field.grid();
  std::vector<double> v(g.size(), 0.0);
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (!(atoms[j].field.grid() == g)) throw DimensionError("synthesize needs atoms on one grid");
    if (!(lambdas[j] >= 0.0)) throw DomainError("synthesize needs nonnegative lambdas");
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += lambdas[j] * atoms[j].field[i];
  }
  return Field(g, std::move(v));
}

inline nlohmann::json atom_metadata(const Atom& a) {
  nlohmann::json shape = nlohmann::json::array();
  for (const auto& [e, c] : a.shape.terms()) shape.push_back({{"exps", e}, {"coeff", c}});
  return {{"kind", "atom"},
          {"ball", ball_to_json(a.ball)},
          {"p0", a.p0},
          {"D", a.D},
          {"seed", a.seed},
          {"exponent", a.exponent.to_json()},
          {"bump_power", a.bump_power},
          {"normalization",
           {{"factor", a.normalization.factor},
            {"target", a.normalization.target},
            {"ball_measure", a.normalization.ball_measure},
            {"ball_norm", a.normalization.ball_norm}}},
          {"shape", shape}};
}

inline void write_atom(const Atom& a, const std::filesystem::path& prefix) { write_field(a.field, prefix, atom_metadata(a)); }

inline Atom read_atom(const std::filesystem::path& prefix) {
  auto loaded = read_field(prefix);
  const auto& j = loaded.extra;
  if (j.value("kind", "") != "atom") throw IoError(prefix.string() + " does not hold an atom");
  Atom a;
  a.field = std::move(loaded.field);
  a.ball = ball_from_json(j.at("ball"));
  a.p0 = j.at("p0").get<double>();
  a.D = j.at("D").get<int>();
  a.seed = j.at("seed").get<std::uint64_t>();
  a.exponent = ExponentFn::from_json(j.at("exponent"));
  a.bump_power = j.at("bump_power").get<int>();
  const auto& n = j.at("normalization");
  a.normalization = {n.at("factor").get<double>(), n.at("target").get<double>(), n.at("ball_measure").get<double>(),
                     n.at("ball_norm").get<double>()};
  for (const auto& t : j.at("shape")) a.shape.add(t.at("exps").get<Poly::Exps>(), t.at("coeff").get<double>());
  return a;
}

}  // namespace hha
