// Acceptance run on the canonical Gaussian: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <thread>

#include "scnls/acceptance.hpp"

int main() {
  using namespace scnls;
  Config cfg;
  cfg.sweep.jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  int failed = 0;
  const auto start = std::chrono::steady_clock::now();
  try {
    const Check seeded = seeded_roundtrip_check(cfg.seed);
    std::cout << (seeded.passed ? "PASS" : "FAIL") << " " << seeded.name << ": " << seeded.detail << std::endl;
    failed += seeded.passed ? 0 : 1;
    run_acceptance(cfg, [&](const CriterionResult& r) {
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cout << (r.passed ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << " -- "
                << r.detail << "  [" << static_cast<int>(secs) << " s]" << std::endl;
      if (!r.passed)
        for (const auto& rep : r.reports)
          for (const auto& c : rep.checks)
            if (!c.passed) std::cout << "    FAIL " << c.name << ": " << c.detail << '\n';
      failed += r.passed ? 0 : 1;
    });
  } catch (const std::exception& e) {
    std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
    return 1;
  }
  std::cout << (failed == 0 ? "all acceptance criteria passed" : "acceptance failures: ")
            << (failed == 0 ? "" : std::to_string(failed)) << std::endl;
  return failed == 0 ? 0 : 1;
}
