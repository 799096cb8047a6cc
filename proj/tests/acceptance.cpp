#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ddvol/suite.hpp"

int main(int argc, char** argv) {
  using namespace ddvol;
  SuiteConfig cfg;
  if (argc > 1) cfg.seed = std::stoull(argv[1]);
  for (const auto& entry : std::filesystem::directory_iterator(DDVOL_DATA_DIR))
    if (entry.path().extension() == ".json") cfg.files.push_back(entry.path().string());
  std::sort(cfg.files.begin(), cfg.files.end());
  auto t0 = std::chrono::steady_clock::now();
  SuiteReport rep = run_suite(cfg);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("seed=%llu samples=%d perturbations=%d alpha=%.17g tie_tol=%g eps_lin=%g\n",
              static_cast<unsigned long long>(cfg.seed), cfg.samples, cfg.perturbations, cfg.dcfg.alpha,
              cfg.dcfg.tie_tol, LinConfig{}.eps_lin);
  for (const auto& c : rep.criteria)
    std::printf("criterion %2d: %s  %s  [%s]\n", c.id, c.pass() ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
  for (const auto& r : rep.rows)
    if (!r.pass)
      std::printf("  failed: criterion %d %s d=%d g=%d kappa=(%s) %s = %s\n", r.criterion, r.instance.c_str(), r.d, r.g,
                  r.kappa.c_str(), r.metric.c_str(), r.value.c_str());
  std::ofstream("acceptance.csv") << suite_csv(rep);
  std::printf("elapsed %.1f s, details in acceptance.csv\n", secs);
  return rep.all_pass() ? 0 : 1;
}
