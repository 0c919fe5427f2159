#pragma once
// The eight verification suites. Each check group appends to a CheckList in a
// fixed order, so reports are reproducible.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "hha/atoms.hpp"
#include "hha/bumps.hpp"
#include "hha/detail/rng.hpp"
#include "hha/luxemburg.hpp"
#include "hha/maximal.hpp"
#include "hha/report.hpp"
#include "hha/suite_config.hpp"
#include "hha/sweep.hpp"

namespace hha {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Range {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t n = 0;

  void add(double v) {
    lo = n == 0 ? v : std::min(lo, v);
    hi = n == 0 ? v : std::max(hi, v);
    ++n;
  }
  double spread() const { return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity(); }
};

/// Odd cell counts so that e is a cell center.
inline GridSpec odd_spec(double Lx, double Lt, double hx, double ht) {
  const auto odd = [](double L, double h) {
    int n = static_cast<int>(std::ceil(2 * L / h));
    if (n % 2 == 0) ++n;
    return 0.5 * n * h;
  };
  return GridSpec{odd(Lx, hx), odd(Lt, ht), hx, ht};
}

/// Uniformly spread direction on the unit gauge sphere.
inline Point1 random_direction(Rng& rng) {
  Point1 u = make_point1(rng.normal(), rng.normal(), 0.25 * rng.normal());
  return dilate(1.0 / koranyi_norm(u), u);
}

/// Grid with spacing (hx, ht) holding `b` with a two-cell margin.
inline GridSpec grid_around(const Ball1& b, double hx, double ht) {
  const auto [lo, hi] = ball_bounding_box(b);
  GridSpec s;
  s.hx = hx;
  s.ht = ht;
  s.Lx = 0.5 * std::max(hi[0] - lo[0], hi[1] - lo[1]) + 2.0 * hx;
  s.Lt = 0.5 * (hi[2] - lo[2]) + 2.0 * ht;
  s.offset = make_point1(0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2]));
  return s;
}

/// Quadrature of ball norms in the frame of the ball: the cells of B(e, 1) on a
/// fixed lattice, mapped by u -> c . delta(u). Left translation and dilation
/// carry Lebesgue measure exactly, so the discrete measure of every B(c, delta)
/// is delta^Q times that of B(e, 1).
class BallFrame {
 public:
  explicit BallFrame(int cells_across = 32) {
    const Ball1 unit(Point1::identity(), 1.0);
    const Grid g(atom_grid_spec(unit, cells_across));
    for (auto i : ball_cells(unit, g)) u_.push_back(g.center(i));
    cv_ = g.cell_volume();
  }

  double measure(const Ball1& b) const { return static_cast<double>(u_.size()) * cv_ * std::pow(b.radius, 4); }

  double norm(const Ball1& b, const ExponentFn& p) const {
    ModularData d;
    d.cell_volume = cv_ * std::pow(b.radius, 4);
    const bool constant = p.is_constant();
    for (const auto& u : u_) d.push(1.0, constant ? p.p_minus() : p(group_mul(b.center, dilate(b.radius, u))));
    return luxemburg_norm(d).value;
  }

 private:
  std::vector<Point1> u_;
  double cv_ = 0.0;
};

struct BallFamily {
  std::vector<Ball1> balls;
  std::vector<double> lambdas;
};

/// Up to `max_balls` random balls in `g` with every cell in at most
/// `max_overlap` of them, and log-uniform coefficients in [0.1, 10].
inline BallFamily random_family(Rng& rng, const Grid& g, int max_balls, int max_overlap, double r_lo, double r_hi) {
  BallFamily fam;
  std::vector<int> cover(g.size(), 0);
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_balls)));
  for (int attempt = 0; attempt < 50 * n && static_cast<int>(fam.balls.size()) < n; ++attempt) {
    const Ball1 b = random_ball(rng, g, r_lo, r_hi);
    const auto cells = ball_cells(b, g);
    if (cells.empty()) continue;
    if (std::any_of(cells.begin(), cells.end(), [&](std::size_t i) { return cover[i] >= max_overlap; })) continue;
    for (auto i : cells) ++cover[i];
    fam.balls.push_back(b);
    fam.lambdas.push_back(std::exp(rng.uniform(std::log(0.1), std::log(10.0))));
  }
  return fam;
}

inline double max_abs_diff(const Point1& a, const Point1& b) {
  return std::max({std::abs(a.x[0] - b.x[0]), std::abs(a.x[1] - b.x[1]), std::abs(a.t - b.t)});
}

inline std::string exponent_names(const std::vector<ExponentFn>& ps, const std::vector<std::size_t>& idx) {
  std::string s;
  for (auto i : idx) s += (s.empty() ? "" : ", ") + ps[i].label();
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------- algebra

inline void algebra_checks(const SuiteConfig& c, CheckList& out) {
  detail::Rng rng(c.seeds.front());
  const auto point = [&rng]() { return make_point1(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)); };
  double sym = 0.0, assoc = 0.0, inv = 0.0, hom = 0.0, ghom = 0.0;
  double tri = -std::numeric_limits<double>::infinity(), rev = tri;
  for (int k = 0; k < c.samples; ++k) {
    const Point1 z = point(), w = point(), v = point();
    const double r = rng.uniform(0.25, 2.0);
    const double rz = koranyi_norm(z), rw = koranyi_norm(w), rzw = koranyi_norm(group_mul(z, w));
    sym = std::max(sym, std::abs(koranyi_norm(group_inv(z)) - rz));
    tri = std::max(tri, rzw - rz - rw);
    rev = std::max(rev, std::abs(rz - rw) - rzw);
    assoc = std::max(assoc, detail::max_abs_diff(group_mul(group_mul(z, w), v), group_mul(z, group_mul(w, v))));
    inv = std::max(inv, detail::max_abs_diff(group_mul(z, group_inv(z)), Point1::identity()));
    hom = std::max(hom, detail::max_abs_diff(dilate(r, group_mul(z, w)), group_mul(dilate(r, z), dilate(r, w))));
    ghom = std::max(ghom, std::abs(koranyi_norm(dilate(r, z)) - r * rz) / std::max(1.0, r * rz));
  }
  const std::string n = " over " + std::to_string(c.samples) + " samples";
  out.add("gauge symmetry" + n, "koranyi-gauge", sym, 0.0, c.tol("gauge"), CheckKind::at_most);
  out.add("gauge triangle inequality excess" + n, "koranyi-gauge", tri, 0.0, c.tol("gauge"), CheckKind::at_most);
  out.add("gauge reverse triangle excess" + n, "koranyi-gauge", rev, 0.0, c.tol("gauge"), CheckKind::at_most);
  out.add("associativity" + n, "group-law", assoc, 0.0, c.tol("group"), CheckKind::at_most);
  out.add("inverse" + n, "group-law", inv, 0.0, c.tol("group"), CheckKind::at_most);
  out.add("dilation automorphism" + n, "dilation-homomorphism", hom, 0.0, c.tol("dilation"), CheckKind::at_most);
  out.add("gauge homogeneity" + n, "dilation-homomorphism", ghom, 0.0, c.tol("dilation"), CheckKind::at_most);

  // X_j applied to the coordinate functions: X1 = d1 + (x2/2) dt, X2 = d2 - (x1/2) dt,
  // T = dt, with the t-terms flipped for the right-invariant fields.
  double vf = 0.0;
  const auto coord = [](int k) { return [k](const Point1& z) { return z.coord(k); }; };
  for (int s = 0; s < 200; ++s) {
    const Point1 z = point();
    for (Side side : {Side::left, Side::right}) {
      const double sg = side == Side::left ? 1.0 : -1.0;
      for (int j = 0; j < 3; ++j) {
        for (int k = 0; k < 3; ++k) {
          double exact = j == k ? 1.0 : 0.0;
          if (k == 2 && j == 0) exact = sg * 0.5 * z.x[1];
          if (k == 2 && j == 1) exact = -sg * 0.5 * z.x[0];
          vf = std::max(vf, std::abs(invariant_derivative<1>(coord(k), MultiIndex1::unit(j), side, z) - exact));
        }
      }
    }
  }
  out.add("invariant fields on coordinates", "invariant-vector-fields", vf, 0.0, c.tol("vector_fields"),
          CheckKind::at_most);
}

// ---------------------------------------------------------------- measure

inline void measure_checks(const SuiteConfig& c, CheckList& out) {
  const double unit = std::numbers::pi * std::numbers::pi / 8.0;
  const Ball1 e1(Point1::identity(), 1.0);
  const double hx = c.grid.hx, ht = c.grid.ht;
  const double m1 = discrete_ball_measure(e1, Grid(GridSpec{c.grid.Lx, c.grid.Lt, hx, ht}));
  out.add("unit ball measure at spacing " + detail::num(hx), "haar-measure", m1, unit, c.tol("unit_ball"),
          CheckKind::relative);
  for (double d : c.deltas) {
    const Ball1 b(Point1::identity(), d);
    const double m = discrete_ball_measure(b, Grid(GridSpec{c.grid.Lx * d, c.grid.Lt * d * d, hx, ht}));
    out.add("ball measure over delta^Q at delta=" + detail::num(d), "ball-measure-scaling", m / std::pow(d, 4), m1,
            c.tol("scaling"), CheckKind::relative);
  }
  detail::Rng rng(c.seeds.front());
  for (int k = 0; k < 3; ++k) {
    const Point1 z = dilate(rng.uniform(0.5, 2.0), detail::random_direction(rng));
    const Ball1 b(z, 1.0);
    const double m = discrete_ball_measure(b, Grid(detail::grid_around(b, hx, ht)));
    out.add("translated unit ball measure " + std::to_string(k + 1), "haar-measure", m, m1, c.tol("invariance"),
            CheckKind::relative);
  }
}

// ---------------------------------------------------------------- luxemburg

inline void luxemburg_checks(const SuiteConfig& c, CheckList& out) {
  const Grid g(c.grid);
  detail::Rng rng(c.seeds.front());
  const auto random_field = [&]() {
    Field f = Field::zeros(g);
    for (int k = 0; k < 3; ++k) {
      const Ball1 b = random_ball(rng, g, 0.3, 0.8);
      f = combine(1.0, f, rng.uniform(-2.0, 2.0), sample_bump(b, 1 + static_cast<int>(rng.below(3)), g));
    }
    return f;
  };

  // Closed forms for indicators of a ball with constant exponents.
  const Ball1 b(Point1::identity(), 0.8);
  const double mb = discrete_ball_measure(b, g);
  std::vector<double> constants = {1.5, 3.0};
  for (const auto& p : c.exponents)
    if (p.is_constant()) constants.push_back(p.p_minus());
  std::sort(constants.begin(), constants.end());
  constants.erase(std::unique(constants.begin(), constants.end()), constants.end());
  for (double p : constants)
    out.add("indicator norm p=" + detail::num(p), "luxemburg-norm",
            luxemburg_norm(indicator(b, g), ExponentFn::make_constant(p)).value, std::pow(mb, 1.0 / p),
            c.tol("closed_form"), CheckKind::relative);

  const int pairs = std::max(1, c.samples);
  for (const auto& p : c.exponents) {
    const std::string lab = " " + p.label();
    double hom = 0.0, pw = 0.0, qt = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
      const Field f = random_field();
      const double nf = lp_norm(f, p);
      const double lam = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
      hom = std::max(hom, std::abs(lp_norm(f.map([lam](double v) { return lam * v; }), p) - lam * nf) / (lam * nf));
      const double s = rng.uniform(0.5, 2.0);
      const double lhs = lp_norm(f.map([s](double v) { return std::pow(std::abs(v), s); }), p.scaled(s));
      pw = std::max(pw, std::abs(lhs - std::pow(nf, s)) / std::pow(nf, s));
      const Field h = random_field();
      const double kq = std::pow(2.0, 1.0 / p.p_underline() - 1.0);
      qt = std::max(qt, lp_norm(combine(1.0, f, 1.0, h), p) / (kq * (nf + lp_norm(h, p))) - 1.0);
    }
    out.add("homogeneity" + lab, "luxemburg-norm", hom, 0.0, c.tol("homogeneity"), CheckKind::at_most);
    out.add("power identity" + lab, "luxemburg-norm", pw, 0.0, c.tol("power"), CheckKind::at_most);
    out.add("quasi-triangle excess" + lab, "quasi-triangle", qt, 0.0, c.tol("quasi_triangle"), CheckKind::at_most);

    if (!(p.p_minus() > 1.0)) continue;
    int violations = 0;
    double worst = 0.0;
    for (int k = 0; k < pairs; ++k) {
      const auto hp = holder_pairing(random_field(), random_field(), p);
      worst = std::max(worst, hp.lhs / hp.rhs);
      if (hp.lhs > hp.rhs) ++violations;
    }
    out.add("Hoelder violations in " + std::to_string(pairs) + " pairs" + lab, "holder-inequality", violations, 0.0,
            c.tol("holder"), CheckKind::at_most, "max lhs/rhs " + detail::num(worst));
    detail::Range dual;
    for (int k = 0; k < 3; ++k) dual.add(dual_norm_estimate(random_field(), p, 32, rng.below(1u << 30)).ratio);
    out.add("dual estimate lower ratio" + lab, "dual-norm-expression", dual.lo, c.tol("dual_lower"), 0.0,
            CheckKind::at_least);
    out.add("dual estimate upper ratio" + lab, "dual-norm-expression", dual.hi, c.tol("dual_upper"), 0.0,
            CheckKind::at_most);
  }
}

// ---------------------------------------------------------------- ballnorms

inline void ballnorms_checks(const SuiteConfig& c, CheckList& out) {
  detail::Rng rng(c.seeds.front());
  const detail::BallFrame frame(32);
  std::vector<Ball1> balls;
  for (int k = 0; k < c.balls; ++k) {
    const double rho = rng.uniform(0.0, 3.0);
    const double delta = std::exp(rng.uniform(std::log(0.25), std::log(2.0)));
    balls.emplace_back(dilate(std::max(rho, 1e-300), detail::random_direction(rng)), delta);
  }

  std::vector<std::size_t> used, skipped;
  detail::Range all;
  for (std::size_t e = 0; e < c.exponents.size(); ++e) {
    const ExponentFn& p = c.exponents[e];
    if (!(p.p_minus() > 1.0)) {
      skipped.push_back(e);
      continue;
    }
    used.push_back(e);
    const ExponentFn pc = conjugate(p);
    detail::Range R, D;
    double const_r = 0.0, const_d = 0.0;
    for (const auto& b : balls) {
      const double nb = frame.norm(b, p);
      const double r = nb * frame.norm(b, pc) / frame.measure(b);
      const double d = frame.norm(b.scaled(2.0), p) / nb;
      R.add(r);
      D.add(d);
      all.add(r);
      if (p.is_constant()) {
        const_r = std::max(const_r, std::abs(r - 1.0));
        const_d = std::max(const_d, std::abs(d / std::pow(2.0, 4.0 / p.p_minus()) - 1.0));
      }
    }
    const std::string lab = " " + p.label() + " over " + std::to_string(balls.size()) + " balls";
    out.add("R(B) spread" + lab, "ball-norm-duality", R.spread(), 1.0, c.tol("spread") - 1.0, CheckKind::at_most,
            "R in [" + detail::num(R.lo) + ", " + detail::num(R.hi) + "]");
    out.add("doubling ratio minimum" + lab, "ball-doubling", D.lo, 1.0, 0.0, CheckKind::at_least);
    out.add("doubling ratio spread" + lab, "ball-doubling", D.spread(), 1.0, c.tol("spread") - 1.0,
            CheckKind::at_most, "ratio in [" + detail::num(D.lo) + ", " + detail::num(D.hi) + "]");
    if (p.is_constant()) {
      out.add("R(B) - 1 for constant" + lab, "ball-norm-duality", const_r, 0.0, c.tol("constant"),
              CheckKind::at_most);
      out.add("doubling ratio / 2^(Q/p) - 1 for constant" + lab, "ball-doubling", const_d, 0.0, c.tol("constant"),
              CheckKind::at_most);
    }
  }
  if (!used.empty())
    out.add("R(B) spread over all exponents", "ball-norm-duality", all.spread(), 1.0, c.tol("spread") - 1.0,
            CheckKind::at_most,
            skipped.empty() ? std::string()
                            : "skipped (p_- <= 1): " + detail::exponent_names(c.exponents, skipped));

  // Sums of ball-supported bumps against sums of indicators in L^(q/q_*).
  const Grid g(c.grid);
  for (const auto& q : c.exponents) {
    const double qs = 0.5 * q.p_underline();
    const double s = 2.0 * q.p_plus() / qs;
    const ExponentFn qq = q.scaled(qs);
    detail::Range ratio;
    for (int f = 0; f < c.families; ++f) {
      const auto fam = detail::random_family(rng, g, 8, 4, 0.5, 1.5);
      std::vector<double> lhs(g.size(), 0.0), rhs(g.size(), 0.0);
      for (std::size_t j = 0; j < fam.balls.size(); ++j) {
        const Ball1& b = fam.balls[j];
        const Field bump = sample_bump(b, 1 + static_cast<int>(rng.below(4)), g, rng.uniform(0.5, 2.0));
        const double A = std::exp(rng.uniform(std::log(0.2), std::log(5.0)));
        const auto cells = ball_cells(b, g);
        const double mb = static_cast<double>(cells.size()) * g.cell_volume();
        const double scale = A * std::pow(mb, 1.0 / s) / detail::lp_const(bump.values(), s, g.cell_volume());
        for (std::size_t i = 0; i < g.size(); ++i) lhs[i] += fam.lambdas[j] * scale * bump[i];
        for (auto i : cells) rhs[i] += A * fam.lambdas[j];
      }
      ratio.add(lp_norm(Field(g, std::move(lhs)), qq) / lp_norm(Field(g, std::move(rhs)), qq));
    }
    out.add("bounded-overlap sum ratio spread " + q.label() + " over " + std::to_string(c.families) + " families",
            "bounded-overlap-sum", ratio.spread(), 1.0, c.tol("overlap_spread") - 1.0, CheckKind::at_most,
            "ratio in [" + detail::num(ratio.lo) + ", " + detail::num(ratio.hi) + "]");
  }
}

// ---------------------------------------------------------------- maximal

inline void maximal_checks(const SuiteConfig& c, CheckList& out) {
  for (double alpha : c.alphas) {
    for (const auto& p : c.exponents) {
      if (!(p.p_minus() > 1.0) || !(alpha == 0.0 || p.p_plus() < 4.0 / alpha)) continue;
      std::vector<double> ds, rs;
      for (double d : c.deltas) {
        const Grid g(c.grid.dilated(d));
        const Field chi = indicator(Ball1(Point1::identity(), d), g);
        ds.push_back(d);
        rs.push_back(fs_ratio({chi}, 2.0, alpha, p, RadiiSchedule::for_grid(g, 4)));
      }
      const std::string lab = " alpha=" + detail::num(alpha) + " " + p.label();
      std::size_t finite = 0;
      for (double r : rs) finite += std::isfinite(r) && r > 0.0 ? 1 : 0;
      out.add("fs ratio finite and positive" + lab, "fefferman-stein-inequality", static_cast<double>(finite),
              static_cast<double>(rs.size()), 0.0, CheckKind::absolute);
      const auto [lo, hi] = std::minmax_element(rs.begin(), rs.end());
      out.add("fs log-ratio slope in delta" + lab, "fefferman-stein-inequality", loglog_slope(ds, rs), 0.0,
              c.tol("slope"), CheckKind::absolute, "ratio in [" + detail::num(*lo) + ", " + detail::num(*hi) + "]");
    }
  }
}

// ---------------------------------------------------------------- atoms

inline void atoms_checks(const SuiteConfig& c, CheckList& out) {
  const double p0 = c.p0.value_or(2.0);
  const AtomTolerances tol{c.tol("moment"), c.tol("size")};

  // Constructed atoms over radii, centers, seeds, D and exponents.
  int built = 0, failed = 0;
  double slack = 0.0, size_dev = 0.0;
  for (int N : c.Ns) {
    for (std::uint64_t seed : c.seeds) {
      detail::Rng rng(seed);
      for (double rho : c.centers) {
        const Point1 dir = detail::random_direction(rng);
        for (double delta : c.deltas) {
          const Ball1 b(rho > 0.0 ? dilate(rho, dir) : Point1::identity(), delta);
          const Grid g(atom_grid_spec(b, 16));
          for (const auto& p : c.exponents) {
            const Atom a = make_atom_retry(b, p, p0, N - 1, seed, g);
            const auto r = validate_atom(a, tol);
            ++built;
            failed += r.pass() ? 0 : 1;
            slack = std::max(slack, r.moment_slack);
            size_dev = std::max(size_dev, std::abs(r.size_ratio() - 1.0));
          }
        }
      }
    }
  }
  const std::string nb = " (" + std::to_string(built) + " atoms)";
  out.add("constructed atoms failing a1-a3" + nb, "atom-definition", failed, 0.0, 0.0, CheckKind::at_most);
  out.add("max moment slack" + nb, "atom-definition", slack, 0.0, tol.moment, CheckKind::at_most);
  out.add("max |size / bound - 1|" + nb, "atom-definition", size_dev, 0.0, tol.size, CheckKind::at_most);

  // Left translates to B(e, delta), carrying the translated exponent.
  std::size_t te = 0;
  for (std::size_t e = 0; e < c.exponents.size(); ++e)
    if (!c.exponents[e].is_constant()) {
      te = e;
      break;
    }
  const ExponentFn& pt = c.exponents[te];
  int moved = 0, tfailed = 0;
  double tslack = 0.0;
  for (int N : c.Ns) {
    for (std::uint64_t seed : c.seeds) {
      detail::Rng rng(seed + 1000);
      for (double rho : c.centers) {
        const Point1 z0 = rho > 0.0 ? dilate(rho, detail::random_direction(rng)) : Point1::identity();
        for (double delta : c.deltas) {
          const Ball1 b(z0, delta);
          const Atom a = make_atom_retry(b, pt, p0, N - 1, seed, Grid(atom_grid_spec(b, 32)));
          const Atom t = translate_atom(a, z0);
          const auto r = validate_atom(t, translated_tolerances(a, t, c.tol("resample")));
          ++moved;
          tfailed += r.pass() ? 0 : 1;
          tslack = std::max(tslack, r.moment_slack);
        }
      }
    }
  }
  const std::string nt = " (" + std::to_string(moved) + " atoms, " + pt.label() + ")";
  out.add("translated atoms failing a1-a3" + nt, "atom-translation", tfailed, 0.0, 0.0, CheckKind::at_most);
  out.add("translated max moment slack" + nt, "atom-translation", tslack, 0.0, c.tol("resample"), CheckKind::at_most);

  // A-quantities over random families with bounded overlap.
  const Grid g(c.grid);
  detail::Rng rng(c.seeds.front() + 2000);
  std::vector<detail::BallFamily> fams;
  for (int f = 0; f < c.families; ++f) fams.push_back(detail::random_family(rng, g, 8, 4, 0.5, 1.5));
  const std::string nf = " over " + std::to_string(fams.size()) + " families";

  for (const auto& p : c.exponents) {
    const double pstar = 0.5 * p.p_underline();
    detail::Range ratio;
    for (const auto& fam : fams)
      ratio.add(script_A(fam.lambdas, fam.balls, p, g, pstar) / script_A(fam.lambdas, fam.balls, p, g));
    out.add("A_p* / A minimum " + p.label() + nf, "atomic-quantity-p-star", ratio.lo, 1.0, c.tol("embedding"),
            CheckKind::at_least);
    out.add("A_p* / A spread " + p.label() + nf, "atomic-quantity-p-star", ratio.spread(), 1.0,
            c.tol("spread") - 1.0, CheckKind::at_most,
            "ratio in [" + detail::num(ratio.lo) + ", " + detail::num(ratio.hi) + "]");
  }

  for (double alpha : c.alphas) {
    if (!(alpha > 0.0)) continue;
    for (const auto& p : c.exponents) {
      if (!(p.p_plus() < 4.0 / alpha)) continue;
      const ExponentFn q = sobolev_exponent(p, alpha);
      detail::Range ratio;
      for (const auto& fam : fams)
        ratio.add(script_A(fam.lambdas, fam.balls, q, g) / script_A(fam.lambdas, fam.balls, p, g));
      out.add("A(q) / A(p) spread alpha=" + detail::num(alpha) + " " + p.label() + nf, "atomic-quantity-sobolev",
              ratio.spread(), 1.0, c.tol("spread") - 1.0, CheckKind::at_most,
              "ratio in [" + detail::num(ratio.lo) + ", " + detail::num(ratio.hi) + "]");
    }
  }
}

// ---------------------------------------------------------------- riesz

inline void kernel_checks(const SuiteConfig& c, CheckList& out) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const Field chi = indicator(Ball1(Point1::identity(), 1.0), Grid(detail::odd_spec(1.1, 0.3, 1.0 / 32, 1.0 / 32)));
  out.add("chi_B(e,1) * K_2 at e, spacing 1/32", "riesz-ball-integral",
          convolve_at(chi, riesz_kernel(2.0), Point1::identity()), pi2 / 4.0, c.tol("ball_integral_2"),
          CheckKind::relative);
  out.add("chi_B(e,1) * K_1 at e, spacing 1/32", "riesz-ball-integral",
          convolve_at(chi, riesz_kernel(1.0), Point1::identity()), pi2 / 2.0, c.tol("ball_integral_1"),
          CheckKind::relative);

  const auto samples = kernel_samples();
  std::vector<int> Ns = c.Ns;
  if (std::find(Ns.begin(), Ns.end(), 2) == Ns.end()) Ns.push_back(2);
  std::sort(Ns.begin(), Ns.end());
  for (double alpha : c.alphas) {
    for (int N : Ns) {
      for (const auto& [anchor, k] : {std::pair<std::string, Kernel>{"riesz-kernel-type", riesz_kernel(alpha)},
                                      std::pair<std::string, Kernel>{"kernel-type", angular_kernel(alpha)}}) {
        const auto rep = validate_kernel_type(k, alpha, N, samples);
        int bad = 0;
        for (const auto& row : rep.rows) bad += row.pass ? 0 : 1;
        const std::string lab = " " + to_string(k.family) + " alpha=" + detail::num(alpha) + " N=" + std::to_string(N);
        out.add("kernel-type rows failing" + lab, anchor, bad, 0.0, 0.0, CheckKind::at_most);
        out.add("kernel constant change under h -> h/2" + lab, anchor, rep.max_rel_change(), 0.0,
                c.tol("kernel_change"), CheckKind::at_most);
      }
    }
  }
}

inline SweepSettings sweep_settings(const SuiteConfig& c, bool hardy) {
  SweepSettings s;
  s.deltas = c.deltas;
  s.centers = c.centers;
  s.seeds = c.seeds;
  s.alphas = c.alphas;
  s.Ns = c.Ns;
  s.exponents = c.exponents;
  s.beta_margin = c.beta_margin;
  s.p0 = c.p0;
  s.hardy = hardy;
  if (hardy)
    s.m_grid = c.grid;
  else
    s.t_grid = c.grid;
  return s;
}

namespace detail {

using OperatorKey = std::tuple<double, int, std::size_t>;

inline std::string operator_label(const OperatorKey& k, const std::vector<ExponentFn>& ps) {
  return "alpha=" + num(std::get<0>(k)) + " N=" + std::to_string(std::get<1>(k)) + " " + ps[std::get<2>(k)].label();
}

inline std::string skipped_note(const SweepResult& r, const std::vector<ExponentFn>& ps) {
  std::string s;
  for (const auto& [alpha, e] : r.skipped)
    s += (s.empty() ? "skipped (p_+ >= Q/alpha): " : "; ") + ("alpha=" + num(alpha) + " " + ps[e].label());
  return s;
}

/// Largest max/min of `value` within a fixed operator (alpha, N, p), and the
/// pooled spread over all points.
template <class F>
std::pair<std::pair<double, std::string>, double> operator_spread(const SweepResult& r,
                                                                  const std::vector<ExponentFn>& ps, F value) {
  std::map<OperatorKey, Range> by;
  Range pooled;
  for (const auto& pt : r.points) {
    by[{pt.alpha, pt.N, pt.exponent}].add(value(pt));
    pooled.add(value(pt));
  }
  std::pair<double, std::string> worst{0.0, ""};
  for (const auto& [k, rg] : by)
    if (rg.spread() > worst.first) worst = {rg.spread(), operator_label(k, ps)};
  return {worst, pooled.spread()};
}

}  // namespace detail

inline void riesz_sweep_checks(const SuiteConfig& c, CheckList& out) {
  const SweepResult r = run_sweep(sweep_settings(c, false), {c.tol("moment"), c.tol("size")});
  const std::string np = " (" + std::to_string(r.points.size()) + " sweep atoms)";
  const std::string skipped = detail::skipped_note(r, c.exponents);

  int invalid = 0;
  for (const auto& pt : r.points) invalid += pt.atom_valid ? 0 : 1;
  out.add("sweep atoms failing a1-a3" + np, "atom-definition", invalid, 0.0, 0.0, CheckKind::at_most);

  const auto [worst, pooled] = detail::operator_spread(r, c.exponents, [](const SweepPoint& p) { return p.lq_norm; });
  out.add("||T a||_q spread per operator" + np, "hp-to-lq-boundedness", worst.first, 1.0, c.tol("spread") - 1.0,
          CheckKind::at_most,
          "worst " + worst.second + "; pooled over all operators " + detail::num(pooled) +
              (skipped.empty() ? "" : "; " + skipped));

  // Slope of log ||T a||_q against log delta at fixed operator, seed and center.
  std::map<std::tuple<double, int, std::size_t, double, std::uint64_t>, std::pair<std::vector<double>, std::vector<double>>>
      series;
  for (const auto& pt : r.points) {
    auto& s = series[{pt.alpha, pt.N, pt.exponent, pt.rho, pt.seed}];
    s.first.push_back(pt.delta);
    s.second.push_back(pt.lq_norm);
  }
  std::map<detail::OperatorKey, double> slope;
  for (const auto& [k, s] : series) {
    if (s.first.size() < 2) continue;
    auto& m = slope[{std::get<0>(k), std::get<1>(k), std::get<2>(k)}];
    const double v = loglog_slope(s.first, s.second);
    if (std::abs(v) >= std::abs(m)) m = v;
  }
  for (const auto& [k, v] : slope)
    out.add("worst log-norm slope in delta " + detail::operator_label(k, c.exponents), "hp-to-lq-boundedness", v,
            0.0, c.tol("slope"), CheckKind::absolute);

  std::map<std::pair<double, int>, std::pair<double, double>> decay;
  for (const auto& d : r.decays) {
    auto [it, fresh] = decay.try_emplace({d.alpha, d.N}, d.fit.slope, d.fit.expected);
    if (!fresh && std::abs(d.fit.slope - d.fit.expected) > std::abs(it->second.first - d.fit.expected))
      it->second.first = d.fit.slope;
  }
  for (const auto& [k, v] : decay)
    out.add("worst decay slope beyond 2 beta^N delta alpha=" + detail::num(k.first) + " N=" + std::to_string(k.second),
            "atom-far-field-decay", v.first, v.second, c.tol("decay"), CheckKind::absolute);
}

inline void hardy_checks(const SuiteConfig& c, CheckList& out) {
  const SweepResult r = run_sweep(sweep_settings(c, true));
  const std::string np = " (" + std::to_string(r.points.size()) + " sweep atoms)";
  const std::string skipped = detail::skipped_note(r, c.exponents);
  const auto [aw, ap] = detail::operator_spread(r, c.exponents, [](const SweepPoint& p) { return p.hp_atom_norm; });
  out.add("||M a||_p spread per exponent pair" + np, "atoms-in-hardy-space", aw.first, 1.0, c.tol("spread") - 1.0,
          CheckKind::at_most, "worst " + aw.second + "; pooled " + detail::num(ap));
  const auto [hw, hp] = detail::operator_spread(r, c.exponents, [](const SweepPoint& p) { return p.hq_norm; });
  out.add("||M(T a)||_q spread per operator" + np, "hp-to-hq-boundedness", hw.first, 1.0, c.tol("spread") - 1.0,
          CheckKind::at_most,
          "worst " + hw.second + "; pooled over all operators " + detail::num(hp) +
              (skipped.empty() ? "" : "; " + skipped));
}

}  // namespace hha
