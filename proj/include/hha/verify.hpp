#pragma once
// Suite dispatch: configuration in, report out.

#include <chrono>
#include <string>

#include "hha/report.hpp"
#include "hha/suite_config.hpp"
#include "hha/suites.hpp"

namespace hha {

inline SuiteReport run_suite(const SuiteConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  CheckList out(cfg.suite);
  if (cfg.suite == "algebra")
    algebra_checks(cfg, out);
  else if (cfg.suite == "measure")
    measure_checks(cfg, out);
  else if (cfg.suite == "luxemburg")
    luxemburg_checks(cfg, out);
  else if (cfg.suite == "ballnorms")
    ballnorms_checks(cfg, out);
  else if (cfg.suite == "maximal")
    maximal_checks(cfg, out);
  else if (cfg.suite == "atoms")
    atoms_checks(cfg, out);
  else if (cfg.suite == "riesz") {
    kernel_checks(cfg, out);
    riesz_sweep_checks(cfg, out);
  } else if (cfg.suite == "hardy")
    hardy_checks(cfg, out);
  else
    throw ConfigError("unknown suite '" + cfg.suite + "'");

  SuiteReport r;
  r.suite = cfg.suite;
  r.config = config_echo(cfg);
  r.checks = std::move(out.checks());
  if (cfg.timing) r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline SuiteReport run_suite(const std::string& suite) { return run_suite(default_config(suite)); }

}  // namespace hha
