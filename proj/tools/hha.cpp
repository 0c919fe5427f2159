// hha verify --suite <name> [--config <file.json>] --out <path> [--format json|csv] [--seed-override <n>]
// Exit codes: 0 all checks pass, 1 a check failed or a value was non-finite,
// 2 configuration error or unknown suite (no report is written).

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "hha/verify.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kConfig = 2;

int verify(const std::string& suite, const std::string& config_path, std::string out, std::string format,
           std::optional<std::uint64_t> seed) {
  hha::SuiteConfig cfg;
  hha::ReportFormat fmt;
  try {
    if (!hha::is_suite(suite)) throw hha::ConfigError("unknown suite '" + suite + "'");
    cfg = config_path.empty() ? hha::default_config(suite) : hha::load_config(config_path, suite);
    if (seed) cfg.seeds = {*seed};
    if (out.empty() && cfg.output_path) out = *cfg.output_path;
    if (format.empty()) format = cfg.output_format.value_or("json");
    if (out.empty()) throw hha::ConfigError("no output path given");
    fmt = hha::report_format_from_string(format);
  } catch (const hha::DomainError& e) {
    std::cerr << "hha: " << e.what() << "\n";
    return kConfig;
  }

  hha::SuiteReport report;
  try {
    report = hha::run_suite(cfg);
  } catch (const hha::NumericError& e) {
    std::cerr << "hha: " << e.what() << "\n";
    return kFail;
  } catch (const hha::DomainError& e) {
    std::cerr << "hha: " << e.what() << "\n";
    return kConfig;
  }
  try {
    hha::emit_report(report, out, fmt);
  } catch (const hha::ReportIoError& e) {
    std::cerr << "hha: " << e.what() << "\n";
    return kConfig;
  }
  for (const auto& c : report.checks)
    if (!c.pass) std::cerr << "FAIL " << c.name << " [" << c.anchor << "] measured " << c.measured << "\n";
  std::cout << report.suite << ": " << report.checks.size() - report.failures() << "/" << report.checks.size()
            << " checks passed\n";
  return report.pass() ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical verification of variable-exponent Hardy space estimates on the Heisenberg group"};
  app.require_subcommand(1);
  auto* cmd = app.add_subcommand("verify", "run one verification suite and write a report");
  std::string suite, config, out, format;
  std::optional<std::uint64_t> seed;
  cmd->add_option("--suite", suite, "suite name")->required();
  cmd->add_option("--config", config, "JSON config file");
  cmd->add_option("--out", out, "report path");
  cmd->add_option("--format", format, "json or csv");
  cmd->add_option("--seed-override", seed, "replace the configured seeds with this one");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfig;
  }
  return verify(suite, config, out, format, seed);
}
