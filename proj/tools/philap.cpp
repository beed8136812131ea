// Command-line entry point: philap <subcommand> --config <file> [flags].

#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "commands.hpp"

using namespace philap::app;

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for multiple positive solutions of Phi-Laplacian problems"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "philap 0.1.0");

  std::string config_path;
  Overrides ov;
  std::vector<std::filesystem::path> solutions;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "YAML experiment config")->required()->envname("PHILAP_CONFIG");
    sub->add_option("--seed", ov.seed, "global seed (fanned out per subtask)")->envname("PHILAP_SEED");
    sub->add_option("--out-dir", ov.out_dir, "output directory")->envname("PHILAP_OUT_DIR");
    sub->add_option("--threads", ov.threads, "worker threads")->check(CLI::PositiveNumber)->envname("PHILAP_THREADS");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", ov.grid, "cells per direction")->check(CLI::Range(2, 1 << 20))->envname("PHILAP_GRID");
  };
  auto add_lambda_band = [&](CLI::App* sub) {
    sub->add_option("--lambda", ov.lambda, "eigenvalue parameter")->check(CLI::PositiveNumber)->envname("PHILAP_LAMBDA");
    sub->add_option("--band", ov.band, "band k: a_{k-1} < |u| <= a_k")->envname("PHILAP_BAND");
  };

  auto* check_phi = app.add_subcommand("check-phi", "certify the growth bounds of phi");
  add_common(check_phi);
  auto* validate_f = app.add_subcommand("validate-f", "check the sign pattern and band integrals of f");
  add_common(validate_f);
  auto* solve_radial = app.add_subcommand("solve-radial", "shooting search for a radial solution in one band");
  add_common(solve_radial);
  add_lambda_band(solve_radial);
  auto* minimize = app.add_subcommand("minimize", "minimize the truncated energy I_k");
  add_common(minimize);
  add_grid(minimize);
  add_lambda_band(minimize);
  minimize->add_option("--multistart", ov.multistart, "number of starts")->check(CLI::PositiveNumber)
      ->envname("PHILAP_MULTISTART");
  auto* sweep = app.add_subcommand("sweep-lambda", "band occupancy over a geometric lambda grid");
  add_common(sweep);
  add_grid(sweep);
  sweep->add_option("--lambda-min", ov.lambda_min, "smallest lambda")->check(CLI::PositiveNumber)
      ->envname("PHILAP_LAMBDA_MIN");
  sweep->add_option("--lambda-max", ov.lambda_max, "largest lambda")->check(CLI::PositiveNumber)
      ->envname("PHILAP_LAMBDA_MAX");
  sweep->add_option("--steps", ov.steps, "number of lambdas")->check(CLI::PositiveNumber)->envname("PHILAP_STEPS");
  sweep->add_option("--multistart", ov.multistart, "starts per (k, lambda)")->check(CLI::PositiveNumber)
      ->envname("PHILAP_MULTISTART");
  auto* verify = app.add_subcommand("verify", "verify nodal solution dumps");
  add_common(verify);
  add_lambda_band(verify);
  verify->add_option("--solution", solutions, "nodal CSV written by minimize (repeatable)")->required()
      ->check(CLI::ExistingFile);
  auto* reproduce = app.add_subcommand("reproduce", "run the acceptance suite");
  add_common(reproduce);

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load_config(config_path);
    apply_overrides(cfg, ov);
    std::cout << "config " << config_path << " (hash " << cfg.hash_hex() << ", seed " << cfg.seed << ")\n";
    if (*check_phi) return cmd_check_phi(cfg);
    if (*validate_f) return cmd_validate_f(cfg);
    if (*solve_radial) return cmd_solve_radial(cfg);
    if (*minimize) return cmd_minimize(cfg);
    if (*sweep) return cmd_sweep_lambda(cfg);
    if (*verify) return cmd_verify(cfg, solutions);
    if (*reproduce) return cmd_reproduce(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const philap::ConditionViolation& e) {
    std::cerr << "condition violated: " << e.what() << " (witness " << e.witness() << ")\n";
    return kExitCheckFailed;
  } catch (const philap::StructuralError& e) {
    std::cerr << "structural error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const philap::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
