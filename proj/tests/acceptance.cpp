// Acceptance run: one PASS/FAIL line per criterion, each under its runtime limit.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "hha/verify.hpp"

namespace {

struct Criterion {
  int id;
  std::string title;
  std::string suite;
  double limit_s;
  std::function<void(const hha::SuiteConfig&, hha::CheckList&)> run;
};

bool run_criterion(const Criterion& c) {
  const auto cfg = hha::default_config(c.suite);
  hha::CheckList out(c.suite);
  const auto start = std::chrono::steady_clock::now();
  std::string error;
  try {
    c.run(cfg, out);
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t failed = 0;
  for (const auto& r : out.checks()) {
    if (r.pass) continue;
    ++failed;
    std::printf("    failed: %s [%s] measured %.6g expected %.6g tol %.3g\n", r.name.c_str(), r.anchor.c_str(),
                r.measured, r.expected, r.tolerance);
  }
  if (!error.empty()) std::printf("    aborted: %s\n", error.c_str());
  const bool in_time = secs < c.limit_s;
  const bool pass = error.empty() && failed == 0 && !out.checks().empty() && in_time;
  std::printf("criterion %d %-44s %s  (%zu checks, %zu failed, %.1f s of %.0f s)\n", c.id, c.title.c_str(),
              pass ? "PASS" : "FAIL", out.checks().size(), failed, secs, c.limit_s);
  std::fflush(stdout);
  return pass;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "group algebra", "algebra", 5, hha::algebra_checks},
      {2, "ball measure and scaling", "measure", 30, hha::measure_checks},
      {3, "Luxemburg norm identities and Hoelder", "luxemburg", 60, hha::luxemburg_checks},
      {4, "ball norms: duality, doubling, overlap sums", "ballnorms", 120, hha::ballnorms_checks},
      {5, "Fefferman-Stein ratio stability", "maximal", 120, hha::maximal_checks},
      {6, "convolution and kernel type", "riesz", 120, hha::kernel_checks},
      {7, "atoms, translations, A-quantities", "atoms", 120, hha::atoms_checks},
      {8, "T_alpha on atoms: norms, slopes, decay", "riesz", 300, hha::riesz_sweep_checks},
      {9, "grand maximal function of T_alpha a", "hardy", 600, hha::hardy_checks},
  };
  int failed = 0;
  for (const auto& c : criteria) failed += run_criterion(c) ? 0 : 1;
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
