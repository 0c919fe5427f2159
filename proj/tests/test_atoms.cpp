#include <catch2/catch_amalgamated.hpp>
#include <filesystem>

#include "hha/atoms.hpp"

using namespace hha;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ExponentFn kBump = ExponentFn::make_gaussian_bump(1.5, 0.5, 1.0);

Atom unit_atom(int D, std::uint64_t seed, const Point1& c = Point1::identity(), double delta = 1.0,
               const ExponentFn& p = kBump, int cells_across = 16) {
  const Ball1 b(c, delta);
  return make_atom(b, p, 2.0, D, seed, Grid(atom_grid_spec(b, cells_across)));
}

}  // namespace

TEST_CASE("constructed atoms satisfy the axioms", "[atoms]") {
  for (int D : {0, 1, 2}) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const Atom a = unit_atom(D, seed, make_point1(0.7, -0.4, 0.3), 0.75);
      const auto r = validate_atom(a);
      CHECK(r.a1);
      CHECK(r.a2);
      CHECK(r.a3);
      CHECK_THAT(r.size, WithinRel(a.normalization.target, 1e-8));
      CHECK(r.moment_slack < 1e-10);
    }
  }
}

TEST_CASE("moment count matches the homogeneous-degree basis", "[atoms]") {
  const Atom a = unit_atom(2, 4);
  // d(I) <= 2 on H^1: 1, x1, x2, x1^2, x1 x2, x2^2, t.
  CHECK(validate_atom(a).moments.size() == 7);
}

TEST_CASE("atom values vanish outside the ball and match the closed form", "[atoms]") {
  const Atom a = unit_atom(1, 5);
  const Grid& g = a.field.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!ball_contains(a.ball, g.center(i))) CHECK(a.field[i] == 0.0);
    else CHECK_THAT(a.field[i], WithinAbs(a(g.center(i)), 1e-13 * a.field.max_abs()));
  }
}

TEST_CASE("counterexamples fail the right axiom", "[atoms]") {
  const Ball1 b(Point1::identity(), 1.0);
  const Grid g(atom_grid_spec(b));
  const Field chi = indicator(b, g);
  const double bound = std::pow(discrete_ball_measure(b, g), 0.5) / ball_norm(b, kBump, g);
  const Field scaled = chi.map([&](double v) { return v * bound / std::pow(discrete_ball_measure(b, g), 0.5); });
  const auto r = validate_atom(scaled, b, kBump, 2.0, 0);
  CHECK(r.a1);
  CHECK(r.a2);
  CHECK_FALSE(r.a3);

  const Atom a = unit_atom(0, 1);
  const auto r2 = validate_atom(a.field.map([](double v) { return 2.0 * v; }), a.ball, kBump, 2.0, 0);
  CHECK_FALSE(r2.a2);
  CHECK(r2.a3);

  const auto r3 = validate_atom(a.field, Ball1(a.ball.center, 0.5), kBump, 2.0, 0);
  CHECK_FALSE(r3.a1);
}

TEST_CASE("moment projection is idempotent", "[atoms]") {
  const Atom a = unit_atom(1, 7);
  const Field again = project_moments(a.field, a.ball, 1);
  const double mx = a.field.max_abs();
  for (std::size_t i = 0; i < again.size(); ++i) CHECK(std::abs(again[i] - a.field[i]) <= 1e-12 * mx);
}

TEST_CASE("degenerate and invalid inputs", "[atoms]") {
  const Ball1 b(Point1::identity(), 1.0);
  const Grid g(atom_grid_spec(b));
  CHECK_THROWS_AS(make_atom_from_shape(b, kBump, 2.0, 0, Poly::constant(1.0), g), DegenerateAtomError);
  CHECK_THROWS_AS(make_atom_from_shape(b, kBump, 2.0, 1, Poly::coordinate(0) + Poly::constant(2.0), g),
                  DegenerateAtomError);
  CHECK_THROWS_AS(make_atom(b, kBump, 1.0, 0, 1, g), DomainError);
  CHECK_THROWS_AS(make_atom(b, kBump, 2.0, -1, 1, g), DomainError);
  // Unresolved: 4 cells across.
  CHECK_THROWS_AS(make_atom(b, kBump, 2.0, 0, 1, Grid(GridSpec{2.0, 1.0, 0.5, 0.0625})), DomainError);
  // Ball outside the box.
  CHECK_THROWS_AS(make_atom(Ball1(make_point1(3, 0, 0), 1.0), kBump, 2.0, 0, 1, g), DomainError);

  std::vector<std::uint64_t> skipped;
  const Atom a = make_atom_retry(b, kBump, 2.0, 0, 11, g, &skipped);
  CHECK(skipped.empty());
  CHECK(a.seed == 11);
}

TEST_CASE("translated atoms re-validate on B(e, delta)", "[atoms]") {
  for (const Point1& c : {make_point1(0.0, 0.0, 0.25), make_point1(1.0, -0.5, 0.2), make_point1(-1.5, 0.8, -0.6)}) {
    for (int D : {0, 1}) {
      for (double delta : {0.25, 1.0}) {
        const Atom a = unit_atom(D, 3, c, delta, kBump, 32);
        const Atom b = translate_atom(a, c);
        CHECK(std::abs(b.ball.center.x[0]) + std::abs(b.ball.center.x[1]) + std::abs(b.ball.center.t) < 1e-15);
        const auto r = validate_atom(b, translated_tolerances(a, b));
        CHECK(r.a1);
        CHECK(r.a2);
        CHECK(r.a3);
        CHECK(r.moment_slack < 1e-6);
        CHECK_THAT(r.size, WithinRel(validate_atom(a).size, 1e-6));
        // The exponent travels with the atom: against the untranslated variable
        // exponent the a2 bound moves by far more than the resampling error.
        const auto r0 = validate_atom(b.field, b.ball, kBump, 2.0, D);
        CHECK(std::abs(r0.size_ratio() - 1.0) > 1e-3);
      }
    }
  }
  // Central translations move the grid rigidly, so the values are unchanged.
  const Point1 c = make_point1(0.0, 0.0, 0.5);
  const Atom a = unit_atom(1, 2, c);
  const Atom b = translate_atom(a, c);
  for (std::size_t i = 0; i < a.field.size(); i += 3) CHECK_THAT(b.field[i], WithinAbs(a.field[i], 1e-12));
  CHECK(validate_atom(b).pass());

  const Atom same = translate_atom(a, Point1::identity());
  CHECK(same.field.values() == a.field.values());

  CHECK_THROWS_AS(translate_atom(a, c, Grid(GridSpec{1.0, 1.0, 1.0 / 8, 1.0 / 16, make_point1(0, 0, 3)})),
                  DomainError);
}

TEST_CASE("synthesis", "[atoms]") {
  const Grid g(GridSpec{3.0, 1.5, 1.0 / 8, 1.0 / 16});
  const ExponentFn two = ExponentFn::make_constant(2.0);
  const Atom a = make_atom(Ball1(make_point1(-1.5, 0, 0), 1.0), two, 2.0, 1, 1, g);
  const Atom b = make_atom(Ball1(make_point1(1.5, 0, 0), 1.0), two, 2.0, 1, 2, g);
  const Atom c = make_atom(Ball1(make_point1(1.0, 0.2, 0), 1.0), two, 2.0, 0, 3, g);

  const Field s1 = synthesize({1.0}, {a});
  CHECK(s1.values() == a.field.values());

  const auto l2sq = [](const Field& f) {
    double s = 0.0;
    for (double v : f.values()) s += v * v;
    return s * f.grid().cell_volume();
  };
  const Field s2 = synthesize({2.0, 3.0}, {a, b});
  CHECK_THAT(l2sq(s2), WithinRel(4.0 * l2sq(a.field) + 9.0 * l2sq(b.field), 1e-10));

  const auto l3 = [&](const Field& f) { return detail::lp_const(f.values(), 3.0, g.cell_volume()); };
  const Field s3 = synthesize({0.5, 2.0}, {b, c});
  CHECK(l3(s3) <= 0.5 * l3(b.field) + 2.0 * l3(c.field));

  CHECK_THROWS_AS(synthesize({1.0}, {a, b}), DimensionError);
  CHECK_THROWS_AS(synthesize({-1.0}, {a}), DomainError);
  CHECK_THROWS_AS(synthesize({1.0, 1.0}, {a, unit_atom(0, 1)}), DimensionError);
}

TEST_CASE("atom serialization round-trip", "[atoms]") {
  const Atom a = unit_atom(1, 9, make_point1(0.2, 0.1, -0.3), 0.8);
  const auto dir = std::filesystem::temp_directory_path() / "hha_test_atoms";
  std::filesystem::create_directories(dir);
  write_atom(a, dir / "atom");
  const Atom b = read_atom(dir / "atom");
  CHECK(b.field.values() == a.field.values());
  CHECK(b.seed == 9);
  CHECK(b.D == 1);
  CHECK(b.exponent.label() == a.exponent.label());
  const Point1 z = make_point1(0.3, 0.2, -0.25);
  CHECK(b(z) == a(z));
  CHECK(validate_atom(b).pass());
  std::filesystem::remove_all(dir);
}
