#ifndef PHILAP_APP_ACCEPTANCE_HPP
#define PHILAP_APP_ACCEPTANCE_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "philap/philap.hpp"

namespace philap::app {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  double seconds = 0;
  double budget = 0;  // wall-clock limit in seconds, 0 for none
  std::string detail;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20240601;
  int threads = 1;
  // Generators exercised by the multiplicity, necessary-condition and weak-residual
  // criteria (6, 7, 9); empty means p_power(2) and curvature(2).
  std::vector<Phi> multiplicity_phis;
  std::vector<int> only;  // criterion ids to run; empty runs all
  std::function<void(const CriterionResult&)> on_result;
};

/// The canonical interleaved skeletons: m = 2 (a = 1, 3) and m = 3 (a = 1, 3, 5),
/// each band with a dip to -0.2 and a hump to 1.
Nonlinearity canonical_f(int m);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);

std::string format_result(const CriterionResult& r);

}  // namespace philap::app

#endif  // PHILAP_APP_ACCEPTANCE_HPP
