#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>

#include "hha/detail/rng.hpp"
#include "hha/field.hpp"
#include "hha/field_io.hpp"

using namespace hha;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kUnitBall = std::numbers::pi * std::numbers::pi / 8.0;

// (1 - rho^4)^8 on the unit ball; its integral is pi^2 / 72 by polar coordinates.
double bump(const Point1& z) {
  const double s = 1.0 - koranyi_fourth(z);
  return s > 0.0 ? ipow(s, 8) : 0.0;
}

}  // namespace

TEST_CASE("grid construction", "[field]") {
  const Grid g(GridSpec{1.0, 0.5, 0.5, 0.25});
  REQUIRE(g.nx() == 4);
  CHECK(g.axis(0) == std::vector<double>{-0.75, -0.25, 0.25, 0.75});
  CHECK(g.nt() == 4);
  CHECK_THAT(Grid(GridSpec{1.0, 1.0, 0.1, 0.05}).cell_volume(), WithinRel(5e-4, 1e-14));
  CHECK_THROWS_AS(Grid(GridSpec{0.0, 1.0, 0.1, 0.1}), DomainError);
  CHECK_THROWS_AS(Grid(GridSpec{1.0, 1.0, -0.1, 0.1}), DomainError);
  CHECK_THROWS_AS(Grid(GridSpec{1.0, 1.0, 2.0, 0.1}), DomainError);

  const auto k = g.locate(make_point1(-0.6, 0.1, 0.3));
  REQUIRE(k);
  CHECK(*k == std::array<int, 3>{0, 2, 3});
  CHECK_FALSE(g.locate(make_point1(1.2, 0, 0)));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g.index(g.unravel(i)[0], g.unravel(i)[1], g.unravel(i)[2]) == i);
}

TEST_CASE("sample and linearity", "[field]") {
  const Grid g(GridSpec{1.25, 0.5, 1.0 / 8, 1.0 / 16});
  const auto chi = indicator(Ball1(Point1::identity(), 1.0), g);
  for (double v : chi.values()) CHECK((v == 0.0 || v == 1.0));
  const auto one = sample([](const Point1&) { return 1.0; }, g);
  for (double v : one.values()) CHECK(v == 1.0);

  const auto f = [](const Point1& z) { return std::sin(z.x[0]) + z.t; };
  const auto h = [](const Point1& z) { return z.x[1] * z.x[1]; };
  const auto lhs = sample([&](const Point1& z) { return 2.0 * f(z) - 3.0 * h(z); }, g);
  const auto rhs = combine(2.0, sample(f, g), -3.0, sample(h, g));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(lhs[i] == rhs[i]);

  CHECK_THROWS_AS(sample([](const Point1&) { return std::numeric_limits<double>::quiet_NaN(); }, g), NumericError);
}

TEST_CASE("support hint requires a one-cell margin", "[field]") {
  const Grid tight(GridSpec{1.0, 0.25, 0.125, 0.125});
  CHECK_THROWS_AS(indicator(Ball1(Point1::identity(), 1.0), tight), DomainError);
  const Grid roomy(GridSpec{1.25, 0.5, 0.125, 0.125});
  CHECK_NOTHROW(indicator(Ball1(Point1::identity(), 1.0), roomy));
}

TEST_CASE("integrate constants exactly", "[field]") {
  const Grid g(GridSpec{1.0, 0.5, 0.125, 0.0625});
  const auto c = sample([](const Point1&) { return 3.0; }, g);
  CHECK(integrate(c) == 3.0 * 4.0 * 1.0);
}

TEST_CASE("unit ball measure", "[field]") {
  const Grid g(GridSpec{1.1, 0.3, 1.0 / 64, 1.0 / 64});
  const Ball1 b(Point1::identity(), 1.0);
  const double m = integrate(indicator(b, g));
  CHECK_THAT(m, WithinRel(kUnitBall, 0.01));
  CHECK(m == discrete_ball_measure(b, g));
}

TEST_CASE("ball measure refinement converges", "[field]") {
  const Ball1 b(Point1::identity(), 1.0);
  double prev = 0.0;
  for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
    const double err = std::abs(integrate(indicator(b, Grid(GridSpec{1.25, 0.5, h, h}))) - kUnitBall);
    if (prev > 0.0) CHECK(prev / err >= 1.5);
    prev = err;
  }
}

TEST_CASE("ball measure scales like delta^Q", "[field]") {
  double lo = 1e9, hi = 0.0;
  for (double d : {0.5, 1.0, 2.0}) {
    const Grid g(GridSpec{1.125 * d, 0.375 * d * d, 1.0 / 64, 1.0 / 64});
    const double ratio = integrate(indicator(Ball1(Point1::identity(), d), g)) / std::pow(d, 4);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  CHECK(hi / lo - 1.0 < 0.02);
}

TEST_CASE("Haar measure is left and right invariant", "[field]") {
  detail::Rng rng(17);
  const Grid fine(GridSpec{2.0, 1.5, 1.0 / 24, 1.0 / 24});
  const Grid coarse(GridSpec{2.0, 1.5, 1.0 / 12, 1.0 / 12});
  const double exact = std::numbers::pi * std::numbers::pi / 72.0;
  const double i0 = integrate(sample(bump, fine));
  CHECK_THAT(i0, WithinRel(exact, 1e-6));
  for (int k = 0; k < 5; ++k) {
    const auto z0 = make_point1(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3));
    for (bool left : {true, false}) {
      const auto g = [&](const Point1& z) { return bump(left ? group_mul(z0, z) : group_mul(z, z0)); };
      const double i1 = integrate(sample(g, fine));
      const double quad_err = std::abs(i1 - integrate(sample(g, coarse))) + std::abs(i0 - integrate(sample(bump, coarse)));
      CHECK(std::abs(i1 - i0) <= 2.0 * quad_err + 1e-14);
    }
  }
}

TEST_CASE("integrate is monotone and linear", "[field]") {
  detail::Rng rng(4);
  const Grid g(GridSpec{1.0, 1.0, 0.25, 0.25});
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(g.size()), b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      a[i] = rng.uniform(-1, 1);
      b[i] = a[i] + rng.uniform(0, 1);
    }
    const Field fa(g, a), fb(g, b);
    CHECK(integrate(fa) <= integrate(fb));
    CHECK_THAT(integrate(combine(2.0, fa, -1.0, fb)), WithinAbs(2.0 * integrate(fa) - integrate(fb), 1e-12));
  }
}

TEST_CASE("compensated summation on long ranges", "[field]") {
  std::vector<double> v(2000001, 1e-3);
  v[0] = 1e8;
  double naive = 0.0;
  for (double x : v) naive += x;
  const double s = detail::ordered_sum(v.begin(), v.end());
  CHECK_THAT(s, WithinAbs(1e8 + 2000.0, 1e-6));
  CHECK(std::abs(s - (1e8 + 2000.0)) <= std::abs(naive - (1e8 + 2000.0)));
}

TEST_CASE("dilated grids relabel cells", "[field]") {
  const Grid g(GridSpec{1.25, 0.5, 1.0 / 8, 1.0 / 16});
  const Field chi = indicator(Ball1(Point1::identity(), 1.0), g);
  const Field big = chi.dilated(2.0, 3.0);
  CHECK(big.grid().nx() == g.nx());
  CHECK(big.grid().nt() == g.nt());
  CHECK_THAT(integrate(big), WithinRel(3.0 * 16.0 * integrate(chi), 1e-13));
  const auto again = indicator(Ball1(Point1::identity(), 2.0), big.grid());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(again[i] * 3.0 == big[i]);
}

TEST_CASE("field binary round trip", "[field][io]") {
  const auto dir = std::filesystem::temp_directory_path() / "hha_field_io";
  std::filesystem::create_directories(dir);
  GridSpec spec{1.25, 0.5, 1.0 / 8, 1.0 / 16};
  spec.offset = make_point1(0.5, -0.25, 0.125);
  const Grid g(spec);
  const Field f = sample([](const Point1& z) { return std::exp(z.x[0]) - z.t * z.x[1]; }, g);
  write_field(f, dir / "f", {{"note", "test"}});
  const auto back = read_field(dir / "f");
  CHECK(back.field.grid() == g);
  CHECK(back.field.values() == f.values());
  CHECK(back.extra.at("note") == "test");
  CHECK(std::filesystem::file_size(dir / "f.bin") == 8 * g.size());
  CHECK_THROWS_AS(read_field(dir / "missing"), IoError);
}
