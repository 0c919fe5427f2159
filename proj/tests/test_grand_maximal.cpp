#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "hha/bumps.hpp"
#include "hha/detail/rng.hpp"
#include "hha/grand_maximal.hpp"

using namespace hha;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("bump antiderivatives", "[grand_maximal]") {
  for (int m : {1, 4, 8}) {
    const detail::BumpAntiderivative G(m, 3);
    for (int j = 0; j <= 3; ++j) {
      CHECK_THAT(G(j, -1.0), WithinAbs(0.0, 1e-13));
      // Composite Simpson on [-1, v].
      for (double v : {-0.3, 0.2, 1.0}) {
        const int n = 2000;
        const double h = (v + 1.0) / n;
        double s = 0.0;
        for (int i = 0; i <= n; ++i) {
          const double x = -1.0 + i * h;
          const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
          s += w * std::pow(x, j) * std::pow(1 - x * x, m);
        }
        CHECK_THAT(G(j, v), WithinAbs(s * h / 3.0, 1e-11));
      }
    }
  }
}

TEST_CASE("polynomial invariant derivatives match finite differences", "[grand_maximal]") {
  const Poly t = Poly::coordinate(2);
  CHECK_THAT(t.invariant(0, Side::left)(make_point1(0.3, 0.8, 0.1)), WithinAbs(0.4, 1e-15));
  CHECK_THAT(t.invariant(0, Side::right)(make_point1(0.3, 0.8, 0.1)), WithinAbs(-0.4, 1e-15));

  const auto shapes = default_profile_shapes();
  const Poly phi = shapes[4].second * (Poly::constant(1.0) - Poly::gauge_fourth()).pow(3);
  const auto f = [&phi](const Point1& z) { return phi(z); };
  detail::Rng rng(5);
  for (const auto& I : multiindices_up_to<1>(2))
    for (Side side : {Side::left, Side::right})
      for (int n = 0; n < 5; ++n) {
        const Point1 z = make_point1(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), rng.uniform(-0.15, 0.15));
        const double exact = phi.apply(I, side)(z);
        const double fd = invariant_derivative<1>(f, I, side, z, 1e-3);
        CHECK_THAT(fd, WithinAbs(exact, 1e-4 * std::max(1.0, std::abs(exact))));
      }
}

TEST_CASE("Schwartz seminorm of a radial bump", "[grand_maximal]") {
  // L = 0: sup (1 + rho)^5 (1 - rho^4) over rho < 1, attained on a gauge sphere.
  const Poly phi = Poly::constant(1.0) - Poly::gauge_fourth();
  double exact = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double r = i / 100000.0;
    exact = std::max(exact, std::pow(1 + r, 5) * (1 - r * r * r * r));
  }
  const double s = schwartz_seminorm(phi, 0, 41);
  CHECK(s <= exact * (1 + 1e-12));
  CHECK(s >= 0.97 * exact);
  CHECK(schwartz_seminorm(phi, 1) > s);
  CHECK_THROWS_AS(schwartz_seminorm(phi, -1), DomainError);
}

TEST_CASE("dictionary construction", "[grand_maximal]") {
  const auto dict = make_dictionary(7, ScaleSchedule{1.0 / 8, 4.0, 16});
  REQUIRE(dict.profiles.size() == 6);
  for (const auto& p : dict.profiles) {
    CHECK(p.m == 8);
    CHECK(std::isfinite(p.seminorm));
    CHECK_THAT(p.scale * p.seminorm, WithinRel(1.0, 1e-15));
    CHECK(p(make_point1(1.0, 0, 0)) == 0.0);
  }
  CHECK(default_seminorm_order(ExponentFn::make_constant(2.0)) == 7);
  CHECK(dict.t_schedule.scales().size() == 25);
  CHECK_THROWS_AS(make_dictionary(7, ScaleSchedule{}, 0), DomainError);
  GrandMaximalDictionary empty{{}, 7, ScaleSchedule{}};
  const Grid g(GridSpec{1, 1, 0.25, 0.25});
  CHECK_THROWS_AS(grand_maximal(Field::zeros(g), empty), DomainError);
}

TEST_CASE("smoothing a constant integrates the profile", "[grand_maximal]") {
  const auto dict = make_dictionary(7, ScaleSchedule{});
  const Grid g(GridSpec{2.0, 1.0, 1.0 / 16, 1.0 / 16});
  const Field one = sample([](const Point1&) { return 1.0; }, g);
  const Profile& bump = dict.profiles[0];
  const double exact = bump.scale * std::numbers::pi * std::numbers::pi / (8.0 * (bump.m + 1));
  for (double t : {0.5, 1.0}) {
    CHECK_THAT(smooth_at(one, bump, t, Point1::identity()), WithinRel(exact, 1e-3));
    CHECK_THAT(smooth_at(one, bump, t, make_point1(0.3, -0.2, 0.1)), WithinRel(exact, 1e-3));
    // Odd profiles integrate to zero.
    CHECK(std::abs(smooth_at(one, dict.profiles[1], t, Point1::identity())) < 1e-6 * exact);
  }
  // Dilation: f * phi_t at t = d on the d-dilated grid is unchanged.
  const Field oned = sample([](const Point1&) { return 1.0; }, Grid(g.spec().dilated(2.0)));
  CHECK_THAT(smooth_at(oned, dict.profiles[3], 2.0, Point1::identity()),
             WithinRel(smooth_at(one, dict.profiles[3], 1.0, Point1::identity()), 1e-12));
}

TEST_CASE("grand maximal properties", "[grand_maximal]") {
  const Grid g(GridSpec{1.5, 1.0, 1.0 / 8, 1.0 / 16});
  const auto sched = ScaleSchedule{1.0 / 8, 2.0, 16};
  const auto full = make_dictionary(7, sched);
  const auto small = make_dictionary(7, sched, 3);
  const Field f = sample_bump(Ball1(make_point1(0.1, 0.0, 0.05), 0.7), 3, g);

  CHECK(grand_maximal(Field::zeros(g), full).is_zero());

  const Field Mf = grand_maximal(f, full);
  const Field Ms = grand_maximal(f, small);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(Mf[i] >= Ms[i]);

  for (double t : sched.scales())
    for (const auto& p : full.profiles) {
      const Field s = smoothed(f, p, t);
      bool ok = true;
      for (std::size_t i = 0; i < g.size(); ++i) ok = ok && Mf[i] >= std::abs(s[i]);
      CHECK(ok);
    }

  // Homogeneity.
  const Field M3 = grand_maximal(f.map([](double v) { return -3.0 * v; }), full);
  for (std::size_t i = 0; i < g.size(); i += 7) CHECK_THAT(M3[i], WithinRel(3.0 * Mf[i], 1e-12));
}

TEST_CASE("grand maximal at e against a direct convolution", "[grand_maximal]") {
  const Grid g(GridSpec{1.5625, 0.53125, 1.0 / 8, 1.0 / 16});
  const Ball1 b(Point1::identity(), 0.75);
  const Field f = sample_bump(b, 3, g);
  const auto dict = make_dictionary(7, ScaleSchedule{1.0 / 8, 2.0, 16});
  const Profile& widest = dict.profiles[0];
  const double t0 = 1.0;

  // Oracle: midpoint sum of f(w) phi_t(w^-1) over a 4x finer lattice with f analytic.
  const double h = 1.0 / 32, ht = 1.0 / 64;
  double oracle = 0.0;
  for (double x1 = -1.0 + h / 2; x1 < 1.0; x1 += h)
    for (double x2 = -1.0 + h / 2; x2 < 1.0; x2 += h)
      for (double t = -0.5 + ht / 2; t < 0.5; t += ht) {
        const Point1 w = make_point1(x1, x2, t);
        const double fw = koranyi_bump(b, 3, w);
        if (fw == 0.0) continue;
        oracle += fw * widest(dilate(1.0 / t0, group_inv(w)));
      }
  oracle *= h * h * ht / std::pow(t0, 4);
  REQUIRE(oracle > 0.0);

  const double direct = smooth_at(f, widest, t0, Point1::identity());
  CHECK_THAT(direct, WithinRel(oracle, 0.05));
  const Field Mf = grand_maximal(f, dict);
  const auto c = g.locate(Point1::identity());
  REQUIRE(c);
  CHECK(Mf[g.index((*c)[0], (*c)[1], (*c)[2])] >= 0.95 * oracle);
}

TEST_CASE("block-averaged scales track the direct quadrature", "[grand_maximal]") {
  const Grid g(GridSpec{1.5, 1.0, 1.0 / 8, 1.0 / 16});
  const Field f = sample_bump(Ball1(make_point1(0.2, -0.1, 0.0), 0.8), 3, g);
  const auto dict = make_dictionary(7, ScaleSchedule{});
  for (double t : {0.5, 2.0, 3.0}) {
    for (int p : {0, 3}) {
      const Field s = smoothed(f, dict.profiles[p], t);
      double err = 0.0, peak = 0.0;
      for (std::size_t i = 0; i < g.size(); i += 37) {
        const double d = smooth_at(f, dict.profiles[p], t, g.center(i));
        err = std::max(err, std::abs(d - s[i]));
        peak = std::max(peak, std::abs(d));
      }
      CHECK(err <= 0.05 * peak);
    }
  }
}
