#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hha/operators.hpp"
#include "hha/verify.hpp"

using namespace hha;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path temp_path(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

SuiteConfig quick_luxemburg() {
  auto c = default_config("luxemburg");
  c.samples = 10;
  return c;
}

double max_rel_diff(const Field& a, const Field& b) {
  REQUIRE(a.size() == b.size());
  double peak = 0.0, diff = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    peak = std::max(peak, std::abs(a[i]));
    diff = std::max(diff, std::abs(a[i] - b[i]));
  }
  return diff / peak;
}

}  // namespace

TEST_CASE("reports are byte-reproducible", "[verify]") {
  const auto a = run_suite(quick_luxemburg());
  const auto b = run_suite(quick_luxemburg());
  for (auto fmt : {ReportFormat::json, ReportFormat::csv}) {
    emit_report(a, temp_path("hha_det_a"), fmt);
    emit_report(b, temp_path("hha_det_b"), fmt);
    CHECK(slurp(temp_path("hha_det_a")) == slurp(temp_path("hha_det_b")));
  }
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK_FALSE(to_json(a).contains("wall_time_s"));
}

TEST_CASE("JSON reports round-trip", "[verify]") {
  auto r = run_suite(quick_luxemburg());
  REQUIRE(!r.checks.empty());
  CHECK(report_from_json(to_json(r)) == r);
  r.wall_time = 1.5;
  CHECK(report_from_json(nlohmann::json::parse(to_json(r).dump())) == r);
}

TEST_CASE("empty report is valid output", "[verify]") {
  SuiteReport r;
  r.suite = "algebra";
  emit_report(r, temp_path("hha_empty.json"), ReportFormat::json);
  const auto j = nlohmann::json::parse(slurp(temp_path("hha_empty.json")));
  CHECK(j.at("checks").empty());
  CHECK(j.at("pass").get<bool>());
  CHECK(report_from_json(j) == r);
  CHECK(report_csv(r) == "suite,check,anchor,measured,expected,tolerance,pass\n");
}

TEST_CASE("CSV has a header and one row per check", "[verify]") {
  const auto r = run_suite(default_config("measure"));
  const std::string csv = report_csv(r);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == r.checks.size() + 1);
  CHECK(csv.rfind("suite,check,anchor,measured,expected,tolerance,pass\n", 0) == 0);
  CHECK(r.pass());
}

TEST_CASE("CSV quotes fields with commas", "[verify]") {
  SuiteReport r;
  r.suite = "s";
  r.checks.push_back({"a, b", "group-law", 1.0, 1.0, 0.0, CheckKind::absolute, true, ""});
  CHECK(report_csv(r).find("\"a, b\"") != std::string::npos);
}

TEST_CASE("check kinds", "[verify]") {
  CHECK(CheckResult::evaluate(CheckKind::absolute, 1.05, 1.0, 0.1));
  CHECK_FALSE(CheckResult::evaluate(CheckKind::relative, 1.2, 1.0, 0.1));
  CHECK(CheckResult::evaluate(CheckKind::at_most, 1.0, 1.0, 0.0));
  CHECK_FALSE(CheckResult::evaluate(CheckKind::at_least, 0.5, 1.0, 0.1));
  for (auto k : {CheckKind::absolute, CheckKind::relative, CheckKind::at_most, CheckKind::at_least})
    CHECK(check_kind_from_string(to_string(k)) == k);
}

TEST_CASE("non-finite measurements abort with the check name", "[verify]") {
  CheckList l("algebra");
  CHECK_THROWS_WITH(l.add("bad value", "group-law", std::nan(""), 0.0, 0.0, CheckKind::absolute),
                    Catch::Matchers::ContainsSubstring("bad value"));
  CHECK_THROWS_AS(l.add("x", "no-such-anchor", 0.0, 0.0, 0.0, CheckKind::absolute), DomainError);
}

TEST_CASE("config errors", "[verify]") {
  CHECK_THROWS_AS(default_config("nope"), ConfigError);
  CHECK_THROWS_AS(run_suite(std::string("nope")), ConfigError);
  CHECK_THROWS_AS(parse_config(nlohmann::json::array()), ConfigError);
  CHECK_THROWS_AS(parse_config({{"suite", "algebra"}, {"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"suite", "algebra"}}, "measure"), ConfigError);
  CHECK_THROWS_AS(parse_config({{"suite", "riesz"}, {"alpha", 4.0}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"suite", "riesz"}, {"beta_margin", 0.5}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"suite", "riesz"}, {"p0", "sometimes"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"suite", "riesz"}, {"tolerances", {{"nope", 1.0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"suite", "riesz"}, {"grid", {{"hx", -1.0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"suite", "riesz"}, {"exponents", {{{"kind", "cubic"}}}}}), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("configs parse with scalar or list values", "[verify]") {
  const auto c = parse_config({{"suite", "riesz"}, {"alpha", 1.5}, {"N", {1, 3}}, {"p0", 3.0}, {"seeds", 9}});
  CHECK(c.alphas == std::vector<double>{1.5});
  CHECK(c.Ns == std::vector<int>{1, 3});
  CHECK(c.p0 == 3.0);
  CHECK(c.seeds == std::vector<std::uint64_t>{9});
  CHECK(parse_config(config_echo(c)).alphas == c.alphas);
}

TEST_CASE("shipped configs load", "[verify]") {
  for (const auto& s : suite_names()) {
    const auto c = load_config(std::string(HHA_SOURCE_DIR) + "/configs/" + s + ".json", s);
    CHECK(c.suite == s);
    CHECK(config_echo(c) == config_echo(default_config(s)));
  }
}

TEST_CASE("emitted anchors are registered to one operation each", "[verify]") {
  std::set<std::string> seen;
  for (const auto& s : {"algebra", "measure", "luxemburg", "ballnorms"}) {
    for (const auto& c : run_suite(s).checks) {
      REQUIRE(anchor_registry().count(c.anchor));
      seen.insert(c.anchor);
    }
  }
  CheckList l("riesz");
  kernel_checks(default_config("riesz"), l);
  for (const auto& c : l.checks()) seen.insert(c.anchor);
  CHECK(seen.size() >= 15);

  const std::set<std::string> modules = {"hgroup_core", "field_grid", "var_exponent", "luxemburg",
                                         "operators",   "atoms",      "verify_cli"};
  for (const auto& [anchor, info] : anchor_registry()) {
    CHECK(modules.count(info.module));
    CHECK_FALSE(info.operation.empty());
    CHECK(anchor.find(' ') == std::string::npos);
  }
}

TEST_CASE("sweep atoms on central balls are relabeled unit atoms", "[verify][sweep]") {
  const Ball1 unit_ball(Point1::identity(), 1.0);
  const ExponentFn two = ExponentFn::make_constant(2.0);
  const Grid ag(atom_grid_spec(unit_ball, 16));
  const Atom unit = make_atom(unit_ball, two, 2.0, 1, 3, ag);
  const double delta = 0.5;
  const Point1 c = sweep_center(1.5);

  const Field moved = relabel(unit.field, delta, 1.0, c);
  const Atom direct = make_atom(Ball1(c, delta), two, 2.0, 1, 3, moved.grid());
  // Same shape up to the normalization constant.
  std::size_t peak = 0;
  for (std::size_t i = 0; i < moved.size(); ++i)
    if (std::abs(moved[i]) > std::abs(moved[peak])) peak = i;
  const double k = direct.field[peak] / moved[peak];
  const Field scaled = moved.map([k](double v) { return k * v; });
  CHECK(max_rel_diff(direct.field, scaled) < 1e-9);
  CHECK(validate_atom(relabel(unit.field, delta, sweep_atom_factor(unit.field, two, 2.0, delta, c), c),
                      Ball1(c, delta), two, 2.0, 1)
            .pass());

  const Kernel kern = riesz_kernel(1.0);
  const GridSpec tg{1.0, 0.5, 1.0 / 8, 1.0 / 16};
  const Field tu = relabel(apply_T(unit.field, kern, Grid(tg)), delta, k * delta, c);
  const Field td = apply_T(direct.field, kern, tu.grid());
  CHECK(max_rel_diff(td, tu) < 1e-9);

  const ScaleSchedule sched = ScaleSchedule::for_grid(Grid(tg), 1.0);
  const Field mu = relabel(grand_maximal(unit.field, make_dictionary(3, sched)), delta, k, c);
  const Field md = grand_maximal(direct.field, make_dictionary(3, sched.dilated(delta)));
  REQUIRE(md.grid().size() == mu.grid().size());
  CHECK(max_rel_diff(md, mu) < 1e-9);
}

TEST_CASE("auto p0 lies strictly between max(1, p+) and Q/alpha", "[verify][sweep]") {
  for (const auto& p : default_exponents()) {
    for (double alpha : {1.0, 2.0}) {
      if (!sweep_admissible(p, alpha)) continue;
      const double p0 = auto_p0(p, alpha);
      CHECK(p0 > std::max(1.0, p.p_plus()));
      CHECK(p0 < 4.0 / alpha);
    }
  }
  CHECK_FALSE(sweep_admissible(ExponentFn::make_constant(2.0), 2.0));
  CHECK_THROWS_AS(sweep_center(-1.0), DomainError);
}
