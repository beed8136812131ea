#ifndef PHILAP_APP_CONFIG_HPP
#define PHILAP_APP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "philap/philap.hpp"

namespace philap::app {

/// Config problems with file/line/field context, e.g. "demo.yaml:12: solver.gtol: must be positive".
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PhiSpec {
  std::string kind = "p_power";  // p_power | curvature | plog | table
  double p = 2;
  double gamma = 2;
  std::filesystem::path table;   // two-column CSV (t, phi(t)), for kind = table
};

struct NonlinearitySpec {
  std::vector<double> skeleton;                      // a_1, b_1, ..., a_m
  std::vector<std::pair<double, double>> nodes;      // (s, f(s))
};

struct DomainSpec {
  std::string shape = "interval";  // interval | rectangle | ball
  double length = 1;
  double width = 1;
  int dimension = 2;
  int grid = 200;
};

struct SolverSpec {
  double gtol = 1e-8;
  long max_iterations = 100000;
  int multistart = 3;
  std::string direction = "newton";  // newton | steepest
  double lambda = 0;                 // single-run lambda (0: take 2x the analytic threshold)
  int band = 2;                      // k: a_{k-1} < |u| <= a_k
  double lambda_min = 1;
  double lambda_max = 1e4;
  int lambda_steps = 40;
  double threshold_delta = 0.0625;
  double radial_step = 1e-3;
  int radial_samples = 64;
  int weak_trials = 32;
  int threads = 1;
};

struct OutputSpec {
  std::filesystem::path dir = "out";
  bool plots = true;
};

struct ExperimentConfig {
  std::filesystem::path source;
  std::uint64_t seed = 0;
  PhiSpec phi;
  NonlinearitySpec f;
  DomainSpec domain;
  SolverSpec solver;
  OutputSpec output;

  /// Canonical text of every effective setting; its FNV-1a hash tags all outputs.
  std::string canonical() const;
  std::uint64_t hash() const { return fnv1a64(canonical()); }
  std::string hash_hex() const;

  Phi make_phi() const;
  Nonlinearity make_f() const;
  Domain<double> make_domain() const;
  GridFunction make_grid() const;
  MinimizeOptions<double> minimize_options() const;
  MultistartOptions<double> multistart_options() const;
  std::vector<double> lambda_grid() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& origin);

/// Checks the cross-field invariants; throws ConfigError naming the field.
void validate_config(const ExperimentConfig& cfg);

/// Reads a two-column (t, phi) CSV, skipping blank lines, '#' comments and a header row.
void read_phi_table(const std::filesystem::path& path, std::vector<double>& t, std::vector<double>& phi);

}  // namespace philap::app

#endif  // PHILAP_APP_CONFIG_HPP
