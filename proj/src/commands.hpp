#ifndef PHILAP_APP_COMMANDS_HPP
#define PHILAP_APP_COMMANDS_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace philap::app {

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> grid;
  std::optional<double> lambda;
  std::optional<int> band;
  std::optional<int> threads;
  std::optional<double> lambda_min;
  std::optional<double> lambda_max;
  std::optional<int> steps;
  std::optional<int> multistart;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

int cmd_check_phi(const ExperimentConfig& cfg);
int cmd_validate_f(const ExperimentConfig& cfg);
int cmd_solve_radial(const ExperimentConfig& cfg);
int cmd_minimize(const ExperimentConfig& cfg);
int cmd_sweep_lambda(const ExperimentConfig& cfg);
int cmd_verify(const ExperimentConfig& cfg, const std::vector<std::filesystem::path>& solutions);
int cmd_reproduce(const ExperimentConfig& cfg);

}  // namespace philap::app

#endif  // PHILAP_APP_COMMANDS_HPP
