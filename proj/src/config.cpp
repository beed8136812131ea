#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace philap::app {

namespace {

struct Context {
  std::string file;

  [[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) const {
    std::ostringstream os;
    os << file;
    if (node.IsDefined() && node.Mark().line >= 0) os << ":" << node.Mark().line + 1;
    os << ": " << field << ": " << what;
    throw ConfigError(os.str());
  }

  void only_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& allowed) const {
    if (!node.IsMap()) fail(node, section, "expected a mapping");
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, section.empty() ? key : section + "." + key, "unknown key");
    }
  }

  template <typename T>
  void read(const YAML::Node& parent, const std::string& key, const std::string& section, T& out) const {
    const YAML::Node node = parent[key];
    if (!node.IsDefined() || node.IsNull()) return;
    try {
      out = node.as<T>();
    } catch (const YAML::BadConversion&) {
      fail(node, section + "." + key, "cannot convert '" + YAML::Dump(node) + "'");
    }
  }
};

void require_positive(const Context& ctx, const YAML::Node& node, const std::string& field, double v) {
  if (!(v > 0) || !std::isfinite(v)) ctx.fail(node, field, "must be positive and finite");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& origin) {
  Context ctx{origin.string()};
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << ctx.file << ":" << e.mark.line + 1 << ":" << e.mark.column + 1 << ": parse error: " << e.msg;
    throw ConfigError(os.str());
  }
  if (!root.IsMap()) throw ConfigError(ctx.file + ": top level must be a mapping");
  ctx.only_keys(root, "", {"seed", "phi", "f", "domain", "solver", "output"});

  ExperimentConfig cfg;
  cfg.source = origin;
  ctx.read(root, "seed", "", cfg.seed);

  if (const auto phi = root["phi"]) {
    ctx.only_keys(phi, "phi", {"kind", "p", "gamma", "table"});
    ctx.read(phi, "kind", "phi", cfg.phi.kind);
    ctx.read(phi, "p", "phi", cfg.phi.p);
    ctx.read(phi, "gamma", "phi", cfg.phi.gamma);
    std::string table;
    ctx.read(phi, "table", "phi", table);
    if (!table.empty()) {
      std::filesystem::path tp(table);
      if (tp.is_relative()) tp = origin.parent_path() / tp;
      if (!std::filesystem::exists(tp)) ctx.fail(phi["table"], "phi.table", "file not found: " + tp.string());
      cfg.phi.table = tp;
    }
    static const std::set<std::string> kinds{"p_power", "curvature", "plog", "table"};
    if (!kinds.count(cfg.phi.kind)) ctx.fail(phi["kind"], "phi.kind", "expected p_power, curvature, plog or table");
    if (cfg.phi.kind == "table" && cfg.phi.table.empty()) ctx.fail(phi, "phi.table", "required for kind = table");
  } else {
    throw ConfigError(ctx.file + ": phi: section missing");
  }

  if (const auto f = root["f"]) {
    ctx.only_keys(f, "f", {"skeleton", "nodes"});
    ctx.read(f, "skeleton", "f", cfg.f.skeleton);
    const auto nodes = f["nodes"];
    if (!nodes.IsDefined() || !nodes.IsSequence()) ctx.fail(f, "f.nodes", "expected a list of [s, f(s)] pairs");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto pair = nodes[i];
      std::ostringstream field;
      field << "f.nodes[" << i << "]";
      if (!pair.IsSequence() || pair.size() != 2) ctx.fail(pair, field.str(), "expected [s, f(s)]");
      try {
        cfg.f.nodes.emplace_back(pair[0].as<double>(), pair[1].as<double>());
      } catch (const YAML::BadConversion&) {
        ctx.fail(pair, field.str(), "entries must be numbers");
      }
    }
    if (cfg.f.skeleton.empty()) ctx.fail(f, "f.skeleton", "required (a_1, b_1, ..., a_m)");
    const double am = cfg.f.skeleton.back();
    const double margin = 1e-9 * std::abs(am);
    for (std::size_t i = 0; i < cfg.f.nodes.size(); ++i) {
      const double s = cfg.f.nodes[i].first;
      if (s < 0 || s > am + margin) {
        std::ostringstream field, what;
        field << "f.nodes[" << i << "]";
        what << "s = " << s << " outside [0, a_m] = [0, " << am << "]";
        ctx.fail(nodes[i], field.str(), what.str());
      }
    }
  } else {
    throw ConfigError(ctx.file + ": f: section missing");
  }

  if (const auto d = root["domain"]) {
    ctx.only_keys(d, "domain", {"shape", "length", "width", "dimension", "grid"});
    ctx.read(d, "shape", "domain", cfg.domain.shape);
    ctx.read(d, "length", "domain", cfg.domain.length);
    ctx.read(d, "width", "domain", cfg.domain.width);
    ctx.read(d, "dimension", "domain", cfg.domain.dimension);
    ctx.read(d, "grid", "domain", cfg.domain.grid);
    if (cfg.domain.shape != "interval" && cfg.domain.shape != "rectangle" && cfg.domain.shape != "ball") {
      ctx.fail(d["shape"], "domain.shape", "expected interval, rectangle or ball");
    }
    require_positive(ctx, d["length"], "domain.length", cfg.domain.length);
    require_positive(ctx, d["width"], "domain.width", cfg.domain.width);
    if (cfg.domain.dimension < 1) ctx.fail(d["dimension"], "domain.dimension", "must be >= 1");
    if (cfg.domain.grid < 2) ctx.fail(d["grid"], "domain.grid", "must be >= 2");
  }

  if (const auto s = root["solver"]) {
    ctx.only_keys(s, "solver",
                  {"gtol", "max_iterations", "multistart", "direction", "lambda", "band", "lambda_min",
                   "lambda_max", "lambda_steps", "threshold_delta", "radial_step", "radial_samples",
                   "weak_trials", "threads"});
    auto& sv = cfg.solver;
    ctx.read(s, "gtol", "solver", sv.gtol);
    ctx.read(s, "max_iterations", "solver", sv.max_iterations);
    ctx.read(s, "multistart", "solver", sv.multistart);
    ctx.read(s, "direction", "solver", sv.direction);
    ctx.read(s, "lambda", "solver", sv.lambda);
    ctx.read(s, "band", "solver", sv.band);
    ctx.read(s, "lambda_min", "solver", sv.lambda_min);
    ctx.read(s, "lambda_max", "solver", sv.lambda_max);
    ctx.read(s, "lambda_steps", "solver", sv.lambda_steps);
    ctx.read(s, "threshold_delta", "solver", sv.threshold_delta);
    ctx.read(s, "radial_step", "solver", sv.radial_step);
    ctx.read(s, "radial_samples", "solver", sv.radial_samples);
    ctx.read(s, "weak_trials", "solver", sv.weak_trials);
    ctx.read(s, "threads", "solver", sv.threads);
    require_positive(ctx, s["gtol"], "solver.gtol", sv.gtol);
    require_positive(ctx, s["threshold_delta"], "solver.threshold_delta", sv.threshold_delta);
    require_positive(ctx, s["radial_step"], "solver.radial_step", sv.radial_step);
    require_positive(ctx, s["lambda_min"], "solver.lambda_min", sv.lambda_min);
    if (sv.max_iterations < 1) ctx.fail(s["max_iterations"], "solver.max_iterations", "must be >= 1");
    if (sv.multistart < 1) ctx.fail(s["multistart"], "solver.multistart", "must be >= 1");
    if (sv.direction != "newton" && sv.direction != "steepest") {
      ctx.fail(s["direction"], "solver.direction", "expected newton or steepest");
    }
    if (sv.lambda < 0) ctx.fail(s["lambda"], "solver.lambda", "must be >= 0");
    if (!(sv.lambda_max > sv.lambda_min)) ctx.fail(s["lambda_max"], "solver.lambda_max", "must exceed lambda_min");
    if (sv.lambda_steps < 1) ctx.fail(s["lambda_steps"], "solver.lambda_steps", "must be >= 1");
    if (sv.radial_samples < 2) ctx.fail(s["radial_samples"], "solver.radial_samples", "must be >= 2");
    if (sv.weak_trials < 1) ctx.fail(s["weak_trials"], "solver.weak_trials", "must be >= 1");
    if (sv.threads < 1) ctx.fail(s["threads"], "solver.threads", "must be >= 1");
  }

  if (const auto o = root["output"]) {
    ctx.only_keys(o, "output", {"dir", "plots"});
    std::string dir;
    ctx.read(o, "dir", "output", dir);
    if (!dir.empty()) cfg.output.dir = dir;
    ctx.read(o, "plots", "output", cfg.output.plots);
  }

  // Structural checks on f and phi surface as config errors too.
  try {
    (void)cfg.make_f();
  } catch (const Error& e) {
    ctx.fail(root["f"], "f", e.what());
  }
  try {
    (void)cfg.make_phi();
  } catch (const Error& e) {
    ctx.fail(root["phi"], "phi", e.what());
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

void validate_config(const ExperimentConfig& cfg) {
  const std::string file = cfg.source.string();
  const int m = static_cast<int>(cfg.f.skeleton.size() / 2 + 1);
  if (cfg.solver.band < 2 || cfg.solver.band > m) {
    std::ostringstream os;
    os << file << ": solver.band: k = " << cfg.solver.band << " outside 2.." << m;
    throw ConfigError(os.str());
  }
  if (cfg.domain.grid < 2) throw ConfigError(file + ": domain.grid: must be >= 2");
  if (!(cfg.solver.gtol > 0)) throw ConfigError(file + ": solver.gtol: must be positive");
  if (cfg.solver.threads < 1) throw ConfigError(file + ": solver.threads: must be >= 1");
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "seed=" << seed << "\n";
  os << "phi.kind=" << phi.kind << "\nphi.p=" << phi.p << "\nphi.gamma=" << phi.gamma << "\n";
  if (!phi.table.empty()) {
    std::vector<double> t, v;
    read_phi_table(phi.table, t, v);
    os << "phi.table=";
    for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << ":" << v[i] << ",";
    os << "\n";
  }
  os << "f.skeleton=";
  for (double a : f.skeleton) os << a << ",";
  os << "\nf.nodes=";
  for (const auto& [s, v] : f.nodes) os << s << ":" << v << ",";
  os << "\ndomain=" << domain.shape << "," << domain.length << "," << domain.width << "," << domain.dimension
     << "," << domain.grid << "\n";
  os << "solver=" << solver.gtol << "," << solver.max_iterations << "," << solver.multistart << ","
     << solver.direction << "," << solver.lambda << "," << solver.band << "," << solver.lambda_min << ","
     << solver.lambda_max << "," << solver.lambda_steps << "," << solver.threshold_delta << ","
     << solver.radial_step << "," << solver.radial_samples << "," << solver.weak_trials << "\n";
  return os.str();
}

std::string ExperimentConfig::hash_hex() const {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << hash();
  return os.str();
}

void read_phi_table(const std::filesystem::path& path, std::vector<double>& t, std::vector<double>& phi) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open phi table");
  std::string line;
  int lineno = 0;
  t.clear();
  phi.clear();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 't,phi'");
    }
    try {
      std::size_t used = 0;
      const double a = std::stod(line.substr(0, comma), &used);
      const double b = std::stod(line.substr(comma + 1));
      t.push_back(a);
      phi.push_back(b);
    } catch (const std::invalid_argument&) {
      if (t.empty()) continue;  // header row
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": non-numeric entry");
    } catch (const std::out_of_range&) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": value out of range");
    }
  }
  if (t.size() < 4) throw ConfigError(path.string() + ": phi table needs at least 4 rows");
}

Phi ExperimentConfig::make_phi() const {
  if (phi.kind == "p_power") return Phi::p_power(phi.p);
  if (phi.kind == "curvature") return Phi::curvature(phi.gamma);
  if (phi.kind == "plog") return Phi::plog(phi.p);
  std::vector<double> t, v;
  read_phi_table(phi.table, t, v);
  return Phi::tabulated(t, v);
}

Nonlinearity ExperimentConfig::make_f() const {
  std::vector<double> s, v;
  for (const auto& [a, b] : f.nodes) {
    s.push_back(a);
    v.push_back(b);
  }
  return Nonlinearity(f.skeleton, s, v);
}

Domain<double> ExperimentConfig::make_domain() const {
  if (domain.shape == "rectangle") return Domain<double>::rectangle(domain.length, domain.width);
  if (domain.shape == "ball") return Domain<double>::ball(domain.length, domain.dimension);
  return Domain<double>::interval(domain.length);
}

GridFunction ExperimentConfig::make_grid() const {
  return GridFunction(make_domain(), domain.grid, domain.shape == "rectangle" ? domain.grid : 0);
}

MinimizeOptions<double> ExperimentConfig::minimize_options() const {
  MinimizeOptions<double> o;
  o.gtol = solver.gtol;
  o.max_iterations = solver.max_iterations;
  o.direction = solver.direction == "steepest" ? DescentDirection::steepest : DescentDirection::modified_newton;
  return o;
}

MultistartOptions<double> ExperimentConfig::multistart_options() const {
  MultistartOptions<double> o;
  o.count = solver.multistart;
  o.seed = seed;
  o.minimize = minimize_options();
  return o;
}

std::vector<double> ExperimentConfig::lambda_grid() const {
  std::vector<double> out;
  const int n = solver.lambda_steps;
  if (n == 1) return {solver.lambda_min};
  const double ratio = std::log(solver.lambda_max / solver.lambda_min);
  for (int i = 0; i < n; ++i) out.push_back(solver.lambda_min * std::exp(ratio * double(i) / double(n - 1)));
  out.back() = solver.lambda_max;
  return out;
}

}  // namespace philap::app
