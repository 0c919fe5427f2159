#pragma once
// Check results, suite reports, JSON/CSV emission, and the anchor registry that
// ties every check to the operation it exercises.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "hha/error.hpp"

namespace hha {

#ifndef HHA_VERSION
#define HHA_VERSION "0.1.0"
#endif

inline constexpr const char* kLibraryVersion = HHA_VERSION;

/// How `measured` is compared with `expected`.
enum class CheckKind {
  /// |measured - expected| <= tolerance
  absolute,
  /// |measured - expected| <= tolerance * |expected|
  relative,
  /// measured <= expected + tolerance
  at_most,
  /// measured >= expected - tolerance
  at_least,
};

inline std::string to_string(CheckKind k) {
  switch (k) {
    case CheckKind::absolute:
      return "absolute";
    case CheckKind::relative:
      return "relative";
    case CheckKind::at_most:
      return "at_most";
    case CheckKind::at_least:
      return "at_least";
  }
  return "absolute";
}

inline CheckKind check_kind_from_string(const std::string& s) {
  if (s == "absolute") return CheckKind::absolute;
  if (s == "relative") return CheckKind::relative;
  if (s == "at_most") return CheckKind::at_most;
  if (s == "at_least") return CheckKind::at_least;
  throw DomainError("unknown check kind '" + s + "'");
}

struct CheckResult {
  std::string name;
  std::string anchor;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  CheckKind kind = CheckKind::absolute;
  bool pass = false;
  std::string note;

  static bool evaluate(CheckKind kind, double m, double e, double tol) {
    switch (kind) {
      case CheckKind::absolute:
        return std::abs(m - e) <= tol;
      case CheckKind::relative:
        return std::abs(m - e) <= tol * std::abs(e);
      case CheckKind::at_most:
        return m <= e + tol;
      case CheckKind::at_least:
        return m >= e - tol;
    }
    return false;
  }

  bool operator==(const CheckResult&) const = default;
};

struct SuiteReport {
  std::string suite;
  nlohmann::json config = nlohmann::json::object();
  std::vector<CheckResult> checks;
  /// Wall time in seconds; negative when not recorded (the default, so that
  /// reports are byte-reproducible).
  double wall_time = -1.0;
  std::string version = kLibraryVersion;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.pass ? 0 : 1;
    return n;
  }

  bool operator==(const SuiteReport&) const = default;
};

struct AnchorInfo {
  std::string module;
  std::string operation;
  std::string statement;
};

/// Every anchor a suite may cite, with the one module operation it exercises.
inline const std::map<std::string, AnchorInfo>& anchor_registry() {
  static const std::map<std::string, AnchorInfo> reg = {
      {"group-law", {"hgroup_core", "group_mul", "group law, inverse and associativity"}},
      {"koranyi-gauge", {"hgroup_core", "koranyi_norm", "symmetry and (reverse) triangle inequality of the gauge"}},
      {"dilation-homomorphism", {"hgroup_core", "dilate", "dilations are automorphisms and rho is 1-homogeneous"}},
      {"invariant-vector-fields", {"hgroup_core", "invariant_derivative", "closed forms of the invariant fields"}},
      {"haar-measure", {"field_grid", "integrate", "Lebesgue measure is Haar measure; |B(e,1)| = pi^2/8"}},
      {"ball-measure-scaling", {"field_grid", "build_grid", "|B(z,delta)| = delta^Q |B(e,1)|"}},
      {"luxemburg-norm", {"luxemburg", "luxemburg_norm", "closed forms, homogeneity and the power identity"}},
      {"quasi-triangle", {"luxemburg", "modular", "||f + g|| <= 2^(1/p_ - 1) (||f|| + ||g||)"}},
      {"holder-inequality", {"luxemburg", "holder_pairing", "int |fg| <= 2 ||f||_p ||g||_p'"}},
      {"dual-norm-expression", {"luxemburg", "dual_norm_estimate", "norm ~ sup over the dual unit ball"}},
      {"ball-norm-duality", {"luxemburg", "luxemburg_norm", "||chi_B||_p ||chi_B||_p' ~ |B| uniformly in B"}},
      {"ball-doubling", {"luxemburg", "luxemburg_norm", "||chi_2B||_p ~ ||chi_B||_p uniformly in B"}},
      {"bounded-overlap-sum", {"luxemburg", "luxemburg_norm", "norms of sums of ball-supported functions"}},
      {"fefferman-stein-inequality", {"operators", "fs_ratio", "off-diagonal vector-valued maximal inequality"}},
      {"kernel-type", {"operators", "validate_kernel_type", "derivative bounds of kernels of type (alpha, N)"}},
      {"riesz-kernel-type", {"operators", "riesz_kernel", "rho^(alpha - Q) is of type (alpha, N) for every N"}},
      {"riesz-ball-integral", {"operators", "convolve", "int over B(e,1) of rho^(alpha-Q) = (Q/alpha) |B(e,1)|"}},
      {"atom-definition", {"atoms", "validate_atom", "support, size and vanishing moments of atoms"}},
      {"atom-translation", {"atoms", "translate_atom", "left translates of atoms are atoms"}},
      {"atomic-quantity-p-star", {"luxemburg", "script_A", "the A-quantity with power p_* < p_ is equivalent"}},
      {"atomic-quantity-sobolev", {"luxemburg", "script_A", "A(lambda, B, q) <= C A(lambda, B, p)"}},
      {"atom-far-field-decay", {"operators", "convolve", "|T_alpha a(z)| ~ rho^(alpha - Q - N) off 2 beta^N B"}},
      {"hp-to-lq-boundedness", {"operators", "convolve", "T_alpha: H^p -> L^q uniformly over atoms"}},
      {"hp-to-hq-boundedness", {"operators", "grand_maximal", "T_alpha: H^p -> H^q uniformly over atoms"}},
      {"atoms-in-hardy-space", {"operators", "grand_maximal", "atoms are uniformly bounded in H^p"}},
  };
  return reg;
}

/// Builds checks and aborts on non-finite measurements, naming the check.
class CheckList {
 public:
  explicit CheckList(std::string suite) : suite_(std::move(suite)) {}

  CheckResult& add(const std::string& name, const std::string& anchor, double measured, double expected,
                   double tolerance, CheckKind kind, const std::string& note = {}) {
    if (!anchor_registry().count(anchor)) throw DomainError("check '" + name + "' cites unknown anchor " + anchor);
    if (!std::isfinite(measured) || !std::isfinite(expected))
      throw NumericError("non-finite value in check '" + name + "' of suite " + suite_);
    checks_.push_back({name, anchor, measured, expected, tolerance, kind,
                       CheckResult::evaluate(kind, measured, expected, tolerance), note});
    return checks_.back();
  }

  std::vector<CheckResult>& checks() { return checks_; }

 private:
  std::string suite_;
  std::vector<CheckResult> checks_;
};

inline nlohmann::json to_json(const CheckResult& c) {
  nlohmann::json j = {{"check", c.name},         {"anchor", c.anchor},       {"measured", c.measured},
                      {"expected", c.expected},  {"tolerance", c.tolerance}, {"kind", to_string(c.kind)},
                      {"pass", c.pass}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline nlohmann::json to_json(const SuiteReport& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  nlohmann::json j = {{"suite", r.suite},  {"version", r.version}, {"config", r.config},
                      {"pass", r.pass()}, {"failures", r.failures()}, {"checks", checks}};
  if (r.wall_time >= 0.0) j["wall_time_s"] = r.wall_time;
  return j;
}

inline SuiteReport report_from_json(const nlohmann::json& j) {
  SuiteReport r;
  r.suite = j.at("suite").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.config = j.at("config");
  r.wall_time = j.value("wall_time_s", -1.0);
  for (const auto& c : j.at("checks"))
    r.checks.push_back({c.at("check").get<std::string>(), c.at("anchor").get<std::string>(),
                        c.at("measured").get<double>(), c.at("expected").get<double>(),
                        c.at("tolerance").get<double>(), check_kind_from_string(c.at("kind").get<std::string>()),
                        c.at("pass").get<bool>(), c.value("note", std::string())});
  return r;
}

namespace detail {

inline std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string report_csv(const SuiteReport& r) {
  std::string out = "suite,check,anchor,measured,expected,tolerance,pass\n";
  for (const auto& c : r.checks)
    out += detail::csv_field(r.suite) + "," + detail::csv_field(c.name) + "," + detail::csv_field(c.anchor) + "," +
           detail::csv_number(c.measured) + "," + detail::csv_number(c.expected) + "," +
           detail::csv_number(c.tolerance) + "," + (c.pass ? "true" : "false") + "\n";
  return out;
}

enum class ReportFormat { json, csv };

inline ReportFormat report_format_from_string(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw DomainError("unknown report format '" + s + "' (expected json or csv)");
}

struct ReportIoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void emit_report(const SuiteReport& r, const std::filesystem::path& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReportIoError("cannot write report to " + path.string());
  if (format == ReportFormat::json)
    out << to_json(r).dump(2) << '\n';
  else
    out << report_csv(r);
  if (!out) throw ReportIoError("short write to " + path.string());
}

}  // namespace hha
