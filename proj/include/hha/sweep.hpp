#pragma once
// Atom sweeps for the T_alpha boundedness checks. Sweep balls B(c, delta) have
// central centers c = (0, 0, rho^2 / 4), so every sweep atom is a rescaled unit
// atom relabeled by dilation and a t-shift, and T_alpha and the grand maximal
// function commute with both: they are computed once per unit atom.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "hha/atoms.hpp"
#include "hha/grand_maximal.hpp"
#include "hha/potential.hpp"

namespace hha {

/// The central element at gauge distance rho from e.
inline Point1 sweep_center(double rho) {
  if (!(rho >= 0.0)) throw DomainError("sweep center distance must be nonnegative");
  return make_point1(0.0, 0.0, 0.25 * rho * rho);
}

/// (max(1, p_+) + Q/alpha) / 2, strictly between max(1, p_+) and Q/alpha.
inline double auto_p0(const ExponentFn& p, double alpha, int Q = 4) {
  if (!(alpha > 0.0)) return std::max(2.0, 2.0 * std::max(1.0, p.p_plus()));
  return 0.5 * (std::max(1.0, p.p_plus()) + Q / alpha);
}

/// u -> scale * f(delta^-1 (c^-1 u)) on the relabeled grid.
inline Field relabel(const Field& f, double delta, double scale, const Point1& c) {
  return f.dilated(delta, scale).shifted_center(c);
}

/// Multiplier turning the unit atom field `unit` (on B(e, 1)) relabeled to
/// B(c, delta) into a (p, p0)-atom meeting the size bound with equality.
inline double sweep_atom_factor(const Field& unit, const ExponentFn& p, double p0, double delta, const Point1& c) {
  const Ball1 b(c, delta);
  const Grid g = relabel(Field::zeros(unit.grid()), delta, 1.0, c).grid();
  const double measure = discrete_ball_measure(b, g);
  const double target = std::pow(measure, 1.0 / p0) / ball_norm(b, p, g);
  const double unit_norm = detail::lp_const(unit.values(), p0, unit.grid().cell_volume());
  return target / (std::pow(delta, 4.0 / p0) * unit_norm);
}

struct SweepSettings {
  std::vector<double> deltas;
  std::vector<double> centers;
  std::vector<std::uint64_t> seeds;
  std::vector<double> alphas;
  std::vector<int> Ns;
  std::vector<ExponentFn> exponents;
  double beta_margin = 2.0;
  std::optional<double> p0;
  /// Unit-scale grids: atoms, T_alpha a, and the grand maximal function.
  GridSpec atom_grid = atom_grid_spec(Ball1(Point1::identity(), 1.0), 16);
  GridSpec t_grid{2.0, 1.0, 1.0 / 8, 1.0 / 16};
  GridSpec m_grid{2.0, 1.0, 1.0 / 4, 1.0 / 16};
  bool hardy = false;
  int decay_shells = 6;
};

struct SweepPoint {
  double delta = 0.0;
  double rho = 0.0;
  std::uint64_t seed = 0;
  int N = 1;
  double alpha = 1.0;
  std::size_t exponent = 0;
  double p0 = 2.0;
  double factor = 0.0;
  bool atom_valid = false;
  double moment_slack = 0.0;
  double size_ratio = 0.0;
  /// ||T a||_q on the relabeled truncation box.
  double lq_norm = 0.0;
  /// ||M(T a)||_q and ||M a||_p on the coarse grids (hardy sweeps only).
  double hq_norm = 0.0;
  double hp_atom_norm = 0.0;
};

struct SweepDecay {
  std::uint64_t seed = 0;
  int N = 1;
  double alpha = 1.0;
  DecayFit fit;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::vector<SweepDecay> decays;
  /// (alpha, exponent index) pairs outside p_+ < Q/alpha.
  std::vector<std::pair<double, std::size_t>> skipped;
  /// Seeds replaced because their projection degenerated.
  std::vector<std::uint64_t> degenerate_seeds;
};

inline bool sweep_admissible(const ExponentFn& p, double alpha, int Q = 4) {
  return p.p_plus() < Q / alpha && p.p_minus() > static_cast<double>(Q) / (Q + 1);
}

/// Runs the sweep; `tol` sets the atom validation slacks.
inline SweepResult run_sweep(const SweepSettings& s, const AtomTolerances& tol = {}) {
  SweepResult out;
  for (double alpha : s.alphas) {
    if (!(alpha > 0.0 && alpha < 4.0)) throw DomainError("sweep alpha must lie in (0, Q)");
    for (std::size_t e = 0; e < s.exponents.size(); ++e)
      if (!sweep_admissible(s.exponents[e], alpha)) out.skipped.emplace_back(alpha, e);
  }
  const Ball1 unit_ball(Point1::identity(), 1.0);
  const Grid atom_grid(s.atom_grid), t_grid(s.t_grid), m_grid(s.m_grid);
  const ScaleSchedule m_schedule = ScaleSchedule::for_grid(m_grid);
  const ExponentFn two = ExponentFn::make_constant(2.0);

  for (std::uint64_t seed : s.seeds) {
    for (int N : s.Ns) {
      const int D = N - 1;
      const Atom unit = make_atom_retry(unit_ball, two, 2.0, D, seed, atom_grid, &out.degenerate_seeds);
      std::optional<Atom> unit_m;
      std::map<int, Field> hp_max;
      if (s.hardy) unit_m = make_atom(unit_ball, two, 2.0, D, unit.seed, m_grid);

      for (double alpha : s.alphas) {
        const Kernel k = riesz_kernel(alpha);
        out.decays.push_back({seed, N, alpha, decay_fit(unit.field, unit_ball, k, N, s.beta_margin, s.decay_shells)});
        bool any = false;
        for (std::size_t e = 0; e < s.exponents.size(); ++e) any = any || sweep_admissible(s.exponents[e], alpha);
        if (!any) continue;

        const Field tu = apply_T(unit.field, k, t_grid);
        std::optional<Field> tum;
        std::map<int, Field> hq_max;
        if (s.hardy) tum = apply_T(unit.field, k, m_grid);

        for (std::size_t e = 0; e < s.exponents.size(); ++e) {
          const ExponentFn& p = s.exponents[e];
          if (!sweep_admissible(p, alpha)) continue;
          const ExponentFn q = sobolev_exponent(p, alpha);
          const double p0 = s.p0.value_or(auto_p0(p, alpha));
          if (!(p0 > std::max(1.0, p.p_plus()))) throw DomainError("p0 must exceed max(1, p_+)");
          for (double rho : s.centers) {
            const Point1 c = sweep_center(rho);
            for (double delta : s.deltas) {
              SweepPoint pt;
              pt.delta = delta;
              pt.rho = rho;
              pt.seed = unit.seed;
              pt.N = N;
              pt.alpha = alpha;
              pt.exponent = e;
              pt.p0 = p0;
              pt.factor = sweep_atom_factor(unit.field, p, p0, delta, c);

              const Field a = relabel(unit.field, delta, pt.factor, c);
              const auto rep = validate_atom(a, Ball1(c, delta), p, p0, D, tol);
              pt.atom_valid = rep.pass();
              pt.moment_slack = rep.moment_slack;
              pt.size_ratio = rep.size_ratio();

              const double scale = pt.factor * std::pow(delta, alpha);
              pt.lq_norm = lp_norm(relabel(tu, delta, scale, c), q);

              if (s.hardy) {
                const int Lq = default_seminorm_order(q);
                auto jt = hq_max.find(Lq);
                if (jt == hq_max.end()) jt = hq_max.emplace(Lq, grand_maximal(*tum, make_dictionary(Lq, m_schedule))).first;
                pt.hq_norm = lp_norm(relabel(jt->second, delta, scale, c), q);
                const int L = default_seminorm_order(p);
                auto it = hp_max.find(L);
                if (it == hp_max.end())
                  it = hp_max.emplace(L, grand_maximal(unit_m->field, make_dictionary(L, m_schedule))).first;
                const double fm = sweep_atom_factor(unit_m->field, p, p0, delta, c);
                pt.hp_atom_norm = lp_norm(relabel(it->second, delta, fm, c), p);
              }
              out.points.push_back(pt);
            }
          }
        }
      }
    }
  }
  return out;
}

}  // namespace hha
