#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hha/bumps.hpp"
#include "hha/detail/rng.hpp"
#include "hha/maximal.hpp"

using namespace hha;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const Ball1 kUnit(Point1::identity(), 1.0);

// Odd cell counts put a cell center at e.
Grid test_grid() { return Grid(GridSpec{1.5625, 1.03125, 1.0 / 8, 1.0 / 16}); }

// Direct oracle: ball sums by testing every cell, ball measure by testing every
// lattice offset in a bounding box, both with the offset predicate.
double brute_force(const Field& f, const Point1& z, double alpha, const RadiiSchedule& s) {
  const Grid& g = f.grid();
  const double hx = g.spec().hx, ht = g.spec().ht;
  const auto k = g.locate(z).value();
  double best = 0.0;
  for (double r : s.radii()) {
    const double r4 = r * r * r * r;
    double I = 0.0;
    for (int a = 0; a < g.nx(); ++a)
      for (int b = 0; b < g.nx(); ++b)
        for (int c = 0; c < g.nt(); ++c)
          if (detail::offset_gauge4(z.x[0], z.x[1], a - k[0], b - k[1], c - k[2], hx, ht) < r4)
            I += std::abs(f.at(a, b, c));
    I *= g.cell_volume();
    double m;
    if (detail::analytic_ball_measure(r, hx, ht)) {
      m = kUnitBallMeasure * r4;
    } else {
      long count = 0;
      const int sx = static_cast<int>(r / hx) + 2;
      const int st = static_cast<int>((r * r / 4 + std::hypot(z.x[0], z.x[1]) * r / 2) / ht) + 2;
      for (int i = -sx; i <= sx; ++i)
        for (int j = -sx; j <= sx; ++j)
          for (int c = -st; c <= st; ++c)
            if (detail::offset_gauge4(z.x[0], z.x[1], i, j, c, hx, ht) < r4) ++count;
      m = count * g.cell_volume();
    }
    if (I > 0.0) best = std::max(best, std::pow(m, alpha / 4.0 - 1.0) * I);
  }
  return best;
}

}  // namespace

TEST_CASE("radius schedules", "[maximal]") {
  const RadiiSchedule s{0.125, 1.0, 2};
  const auto r = s.radii();
  REQUIRE(r.size() == 7);
  CHECK(r.front() == 0.125);
  CHECK(r.back() == 1.0);
  CHECK_THROWS_AS((RadiiSchedule{0.0, 1.0, 2}.radii()), DomainError);
  CHECK_THROWS_AS((RadiiSchedule{1.0, 0.5, 2}.radii()), DomainError);
  CHECK_THROWS_AS(frac_maximal(Field::zeros(test_grid()), 4.0, s), DomainError);
}

TEST_CASE("lattice ball counts", "[maximal]") {
  // B(e, r) with r = 1 on the unit lattice: only the origin (boundary points excluded).
  CHECK(detail::lattice_ball_count(0.0, 0.0, 1.0, 1.0, 1.0) == 1.0);
  CHECK(detail::lattice_ball_count(0.0, 0.0, 1.0001, 1.0, 1.0) == 5.0);
  // Large balls approach c r^Q.
  const double h = 1.0 / 16;
  CHECK_THAT(detail::lattice_ball_count(0.3, -0.2, 1.5, h, h) * h * h * h,
             WithinRel(kUnitBallMeasure * std::pow(1.5, 4), 0.02));
  // The count does not depend on which cell of the column the center is.
  const Grid g(GridSpec{1.0, 1.0, 1.0 / 8, 1.0 / 8});
  for (double r : {0.3, 0.55, 0.9}) {
    const auto ref = detail::lattice_ball_count(g.axis(0)[3], g.axis(1)[5], r, 0.125, 0.125);
    long brute = 0;
    const Point1 z = g.center(3, 5, 7);
    for (int i = -10; i <= 10; ++i)
      for (int j = -10; j <= 10; ++j)
        for (int k = -10; k <= 10; ++k)
          if (ball_contains(Ball1(z, r), make_point1(z.x[0] + i * 0.125, z.x[1] + j * 0.125, z.t + k * 0.125))) ++brute;
    CHECK(ref == static_cast<double>(brute));
  }
}

TEST_CASE("maximal operator matches a brute-force oracle", "[maximal]") {
  const Grid g = test_grid();
  detail::Rng rng(5);
  const Field f = combine(1.0, sample_bump(Ball1(make_point1(0.2, -0.1, 0.1), 0.6), 3, g), 0.5,
                          indicator(Ball1(make_point1(-0.5, 0.4, -0.2), 0.5), g));
  const RadiiSchedule s{g.spec().hx, 4.0, 4};
  for (double alpha : {0.0, 1.0, 2.5}) {
    const Field m = frac_maximal(f, alpha, s);
    for (int k = 0; k < 25; ++k) {
      const std::size_t i = static_cast<std::size_t>(rng.below(g.size()));
      CHECK_THAT(m[i], WithinRel(brute_force(f, g.center(i), alpha, s), 1e-10));
    }
  }
}

TEST_CASE("Hardy-Littlewood examples", "[maximal]") {
  const Grid g = test_grid();
  const Field chi = indicator(kUnit, g);
  const RadiiSchedule s = RadiiSchedule::for_grid(g);
  const Field m = hl_maximal(chi, s);
  REQUIRE(g.center(g.nx() / 2, g.nx() / 2, g.nt() / 2) == Point1::identity());
  CHECK_THAT(m.at(g.nx() / 2, g.nx() / 2, g.nt() / 2), WithinAbs(1.0, 1e-14));

  const Field c = sample([](const Point1&) { return 2.5; }, g);
  const Field mc = hl_maximal(c, RadiiSchedule{g.spec().hx, 0.3, 8});
  for (int a = 5; a < g.nx() - 5; ++a)
    for (int b = 5; b < g.nx() - 5; ++b)
      for (int k = 6; k < g.nt() - 6; ++k) CHECK_THAT(mc.at(a, b, k), WithinRel(2.5, 1e-13));

  // B(z, R+1) swallows the ball, so (R+1)^-Q is a lower bound; smaller balls
  // catching most of it do better by a bounded factor.
  const Grid wide(GridSpec{4.0625, 1.03125, 1.0 / 8, 1.0 / 16});
  const Field chiw = indicator(kUnit, wide);
  const Field mw = hl_maximal(chiw, RadiiSchedule::for_grid(wide));
  for (int a : {wide.nx() / 2 + 20, wide.nx() / 2 + 24}) {
    const auto z = wide.center(a, wide.nx() / 2, wide.nt() / 2);
    const double R = koranyi_norm(z);
    const double v = mw.at(a, wide.nx() / 2, wide.nt() / 2);
    CHECK(v >= std::pow(R + 1.0, -4) * 0.95);
    CHECK(v <= std::pow(R + 1.0, -4) * 2.0);
  }
}

TEST_CASE("fractional maximal examples", "[maximal]") {
  const Grid g = test_grid();
  const Field chi = indicator(kUnit, g);
  const RadiiSchedule s = RadiiSchedule::for_grid(g);
  const int cx = g.nx() / 2, ct = g.nt() / 2;
  const double bm = discrete_ball_measure(kUnit, g);
  for (double alpha : {0.0, 1.0, 2.0, 3.0}) {
    const Field m = frac_maximal(chi, alpha, s);
    CHECK(m.at(cx, cx, ct) >= std::pow(bm, alpha / 4.0) * (1 - 1e-12));
    CHECK_THAT(m.at(cx, cx, ct), WithinRel(std::pow(kUnitBallMeasure, alpha / 4.0), 0.05));
  }
  CHECK(frac_maximal(chi, 0.0, s).values() == hl_maximal(chi, s).values());

  for (double d : {0.5, 2.0}) {
    const Grid gd(g.spec().dilated(d));
    const Field chid = indicator(Ball1(Point1::identity(), d), gd);
    const double alpha = 1.5;
    const Field m = frac_maximal(chid, alpha, s.dilated(d));
    CHECK_THAT(m.at(cx, cx, ct), WithinRel(std::pow(d, alpha) * std::pow(kUnitBallMeasure, alpha / 4.0), 0.05));
  }
}

TEST_CASE("maximal operator properties", "[maximal][property]") {
  const Grid g(GridSpec{1.25, 0.75, 1.0 / 8, 1.0 / 8});
  const RadiiSchedule s = RadiiSchedule::for_grid(g, 4);
  detail::Rng rng(3);
  for (int trial = 0; trial < 3; ++trial) {
    const Ball1 b = random_ball(rng, g, 0.3, 0.7);
    const Field f = sample_bump(b, 3, g);
    const Field big = combine(1.0, f, 1.0, sample_bump(random_ball(rng, g, 0.3, 0.7), 3, g));
    for (double alpha : {0.0, 1.0}) {
      const Field mf = frac_maximal(f, alpha, s);
      const Field mb = frac_maximal(big, alpha, s);
      const Field m3 = frac_maximal(f.map([](double v) { return 3.0 * v; }), alpha, s);
      for (std::size_t i = 0; i < g.size(); ++i) {
        CHECK(mf[i] <= mb[i] * (1 + 1e-12));
        CHECK_THAT(m3[i], WithinRel(3.0 * mf[i], 1e-12));
      }
      // Lower bound by every scheduled ball at a few cells.
      for (int k = 0; k < 5; ++k) {
        const std::size_t i = static_cast<std::size_t>(rng.below(g.size()));
        CHECK(mf[i] >= brute_force(f, g.center(i), alpha, s) * (1 - 1e-12));
      }
    }
  }
}

TEST_CASE("Fefferman-Stein ratio", "[maximal]") {
  const Grid g = test_grid();
  const Field chi = indicator(kUnit, g);
  const RadiiSchedule s = RadiiSchedule::for_grid(g, 4);
  const auto p2 = ExponentFn::make_constant(2.0);
  const double r0 = fs_ratio({chi}, 2.0, 0.0, p2, s);
  CHECK(std::isfinite(r0));
  CHECK(r0 > 0.0);
  const auto gb = ExponentFn::make_gaussian_bump(1.2, 0.4, 1.0);
  const Field bump = sample_bump(Ball1(make_point1(0.3, 0, 0), 0.5), 3, g);
  const double r1 = fs_ratio({chi, bump}, 2.0, 1.0, gb, s);
  const double r1s = fs_ratio({chi.map([](double v) { return 3 * v; }), bump.map([](double v) { return 3 * v; })},
                              2.0, 1.0, gb, s);
  CHECK_THAT(r1s, WithinRel(r1, 1e-9));
  CHECK_THAT(fs_ratio({chi, chi}, 2.0, 0.0, p2, s), WithinRel(r0, 1e-9));
  CHECK_THROWS_AS(fs_ratio({}, 2.0, 0.0, p2, s), DomainError);
  CHECK_THROWS_AS(fs_ratio({Field::zeros(g)}, 2.0, 0.0, p2, s), DomainError);
}
