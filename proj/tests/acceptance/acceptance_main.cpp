// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <cstdlib>
#include <iostream>
#include <string>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  philap::app::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  opt.on_result = [](const philap::app::CriterionResult& r) {
    std::cout << philap::app::format_result(r) << std::endl;
  };
  const auto results = philap::app::run_acceptance(opt);
  int failed = 0;
  for (const auto& r : results) failed += !r.passed;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
