#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "commands.hpp"
#include "output.hpp"

using namespace philap;
using namespace philap::app;

namespace {

const char* kGood = R"(seed: 5
phi:
  kind: curvature
  gamma: 2
f:
  skeleton: [1, 2, 3]
  nodes: [[0, 1], [1, 0], [1.5, -0.2], [2, 0], [2.5, 1], [3, 0]]
domain:
  shape: interval
  length: 1
  grid: 50
solver:
  band: 2
)";

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "philap_test_config";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Config, ParsesValidFile) {
  const auto cfg = parse_config(kGood, "good.yaml");
  EXPECT_EQ(cfg.seed, 5u);
  EXPECT_EQ(cfg.phi.kind, "curvature");
  EXPECT_EQ(cfg.make_f().m(), 2);
  EXPECT_EQ(cfg.make_grid().cells1(), 50);
  EXPECT_DOUBLE_EQ(cfg.make_phi().nfunction(1), 3.0);
}

TEST(Config, HashIsStableAndSensitive) {
  const auto a = parse_config(kGood, "a.yaml");
  const auto b = parse_config(kGood, "b.yaml");
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_EQ(a.hash_hex().size(), 16u);
  auto c = a;
  c.seed = 6;
  EXPECT_NE(a.hash(), c.hash());
}

TEST(Config, UnknownKeyReportsLineAndField) {
  std::string text = kGood;
  text += "  bogus: 1\n";
  try {
    parse_config(text, "bad.yaml");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("bad.yaml:"), std::string::npos) << msg;
    EXPECT_NE(msg.find("bogus"), std::string::npos) << msg;
  }
}

TEST(Config, NodeOutsideSkeletonRejected) {
  std::string text = kGood;
  text.replace(text.find("[3, 0]]"), 7, "[3, 0], [4, 1]]");
  EXPECT_THROW(parse_config(text, "n.yaml"), ConfigError);
}

TEST(Config, BadKindRejected) {
  std::string text = kGood;
  text.replace(text.find("curvature"), 9, "cubic");
  EXPECT_THROW(parse_config(text, "k.yaml"), ConfigError);
}

TEST(Config, MissingNonlinearityRejected) {
  EXPECT_THROW(parse_config("phi:\n  kind: p_power\n  p: 2\n", "m.yaml"), ConfigError);
}

TEST(Config, LambdaGridIsGeometric) {
  auto cfg = parse_config(kGood, "g.yaml");
  cfg.solver.lambda_min = 1;
  cfg.solver.lambda_max = 1000;
  cfg.solver.lambda_steps = 4;
  const auto g = cfg.lambda_grid();
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g[1], 10, 1e-9);
  EXPECT_NEAR(g[3], 1000, 1e-9);
}

TEST(Config, OverridesApplyAndValidate) {
  auto cfg = parse_config(kGood, "o.yaml");
  Overrides o;
  o.grid = 80;
  o.seed = 9;
  apply_overrides(cfg, o);
  EXPECT_EQ(cfg.domain.grid, 80);
  EXPECT_EQ(cfg.seed, 9u);
  Overrides bad;
  bad.lambda_min = 10;
  bad.lambda_max = 5;
  EXPECT_THROW(apply_overrides(cfg, bad), ConfigError);
}

TEST(Csv, HeaderCarriesHashAndRoundTrips) {
  GridFunction u(Domain<double>::interval(1), 8);
  for (Eigen::Index i = 1; i < 8; ++i) u[i] = 0.1 * double(i) + 1.0 / 3.0;
  auto t = nodal_table(u, "00ff");
  t.meta("lambda", 12.5);
  const auto path = scratch("u.csv");
  t.write(path);
  EXPECT_EQ(slurp(path).rfind("# config_hash=00ff", 0), 0u);
  const auto data = read_csv(path);
  EXPECT_EQ(data.meta.at("lambda"), "12.5");
  const auto v = grid_from_csv(data, Domain<double>::interval(1));
  for (Eigen::Index i = 0; i < u.node_count(); ++i) EXPECT_EQ(v[i], u[i]);
}

TEST(Csv, RectangleRoundTrip) {
  GridFunction u(Domain<double>::rectangle(2, 1), 4, 3);
  for (Eigen::Index i = 0; i < u.node_count(); ++i) u[i] = std::sin(double(i));
  u.enforce_boundary();
  const auto path = scratch("r.csv");
  nodal_table(u, "aa").write(path);
  const auto v = grid_from_csv(read_csv(path), Domain<double>::rectangle(2, 1));
  ASSERT_EQ(v.cells1(), 4);
  ASSERT_EQ(v.cells2(), 3);
  for (Eigen::Index i = 0; i < u.node_count(); ++i) EXPECT_EQ(v[i], u[i]);
}

TEST(Commands, SameSeedGivesByteIdenticalOutputs) {
  auto cfg = parse_config(kGood, "d.yaml");
  cfg.solver.lambda = 20000;
  cfg.output.plots = false;
  cfg.output.dir = scratch("run_a");
  ASSERT_EQ(cmd_minimize(cfg), kExitOk);
  cfg.output.dir = scratch("run_b");
  ASSERT_EQ(cmd_minimize(cfg), kExitOk);
  for (const char* name : {"energy_reports_k2.csv", "solution_k2.csv"}) {
    EXPECT_EQ(slurp(scratch("run_a") / name), slurp(scratch("run_b") / name)) << name;
  }
}

TEST(Commands, CheckPhiCurvatureReportsBounds) {
  auto cfg = parse_config(kGood, "c.yaml");
  cfg.output.plots = false;
  cfg.output.dir = scratch("phi");
  ASSERT_EQ(cmd_check_phi(cfg), kExitOk);
  const auto text = slurp(scratch("phi") / "phi_certification.csv");
  EXPECT_NE(text.find("\nGamma1,1\n"), std::string::npos) << text;
  EXPECT_NE(text.find("\nGamma2,3\n"), std::string::npos) << text;
}

TEST(Commands, ValidateFRejectsDeepDip) {
  std::string text = kGood;
  text.replace(text.find("[1.5, -0.2]"), 11, "[1.5, -2.0]");
  auto cfg = parse_config(text, "v.yaml");
  cfg.output.plots = false;
  cfg.output.dir = scratch("vf");
  EXPECT_EQ(cmd_validate_f(cfg), kExitCheckFailed);
}
