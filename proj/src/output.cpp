#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "config.hpp"

namespace philap::app {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::string config_hash, std::vector<std::string> columns)
    : hash_(std::move(config_hash)), columns_(std::move(columns)) {}

void CsvTable::meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
void CsvTable::meta(const std::string& key, double value) { meta_.emplace_back(key, format_number(value)); }

CsvTable& CsvTable::row() {
  rows_.emplace_back();
  return *this;
}

CsvTable& CsvTable::operator<<(double v) {
  if (rows_.empty()) row();
  rows_.back().push_back(format_number(v));
  return *this;
}

CsvTable& CsvTable::operator<<(long v) {
  if (rows_.empty()) row();
  rows_.back().push_back(std::to_string(v));
  return *this;
}

CsvTable& CsvTable::operator<<(const std::string& v) {
  if (rows_.empty()) row();
  std::string cell = v;
  if (cell.find_first_of(",\"\n") != std::string::npos) {
    std::string quoted = "\"";
    for (char c : cell) {
      if (c == '"') quoted += '"';
      quoted += c == '\n' ? ' ' : c;
    }
    cell = quoted + "\"";
  }
  rows_.back().push_back(cell);
  return *this;
}

std::string CsvTable::str() const {
  std::ostringstream os;
  os << "# config_hash=" << hash_ << "\n";
  for (const auto& [k, v] : meta_) os << "# " << k << "=" << v << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << columns_[i];
  os << "\n";
  for (const auto& r : rows_) {
    if (r.size() != columns_.size()) throw std::logic_error("CSV row width does not match the header");
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << "\n";
  }
  return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<double> CsvData::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw ConfigError("CSV has no column '" + name + "'");
  const auto idx = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(idx));
  return out;
}

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open CSV");
  CsvData data;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        auto key = line.substr(1, eq - 1);
        key.erase(0, key.find_first_not_of(' '));
        data.meta[key] = line.substr(eq + 1);
      }
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (data.columns.empty()) {
      data.columns = cells;
      continue;
    }
    if (cells.size() != data.columns.size()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": row width differs from header");
    }
    std::vector<double> values;
    for (const auto& c : cells) {
      try {
        values.push_back(std::stod(c));
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": non-numeric cell '" + c + "'");
      }
    }
    data.rows.push_back(std::move(values));
  }
  if (data.columns.empty()) throw ConfigError(path.string() + ": no header row");
  return data;
}

CsvTable nodal_table(const GridFunction& u, const std::string& config_hash) {
  const auto shape = u.domain().shape;
  std::vector<std::string> cols;
  if (shape == DomainShape::rectangle) {
    cols = {"x", "y", "u"};
  } else if (shape == DomainShape::ball) {
    cols = {"r", "u"};
  } else {
    cols = {"x", "u"};
  }
  CsvTable t(config_hash, cols);
  t.meta("domain", u.domain().describe());
  for (Eigen::Index i = 0; i < u.node_count(); ++i) {
    t.row() << u.coordinate1(i);
    if (shape == DomainShape::rectangle) t << u.coordinate2(i);
    t << u[i];
  }
  return t;
}

GridFunction grid_from_csv(const CsvData& data, const Domain<double>& domain) {
  const auto rows = static_cast<long>(data.rows.size());
  if (domain.shape == DomainShape::rectangle) {
    // Nodes are written x-fastest, so the first row of constant y gives the x count.
    const auto ys = data.column("y");
    long nx = 0;
    while (nx < rows && ys[std::size_t(nx)] == ys.front()) ++nx;
    if (nx < 2 || rows % nx != 0 || rows / nx < 2) {
      throw ConfigError("solution CSV: rectangle dump is not a full tensor grid");
    }
    GridFunction u(domain, int(nx - 1), int(rows / nx - 1));
    const auto values = data.column("u");
    for (long i = 0; i < rows; ++i) u[i] = values[std::size_t(i)];
    return u;
  }
  GridFunction u(domain, int(rows - 1));
  const auto values = data.column("u");
  for (long i = 0; i < rows; ++i) u[i] = values[std::size_t(i)];
  return u;
}

CsvTable profile_table(const RadialProfile<double>& p, const std::string& config_hash) {
  CsvTable t(config_hash, {"r", "u", "du", "Q", "identity_residual"});
  t.meta("lambda", p.lambda);
  t.meta("dimension", double(p.dimension));
  t.meta("d", p.d);
  t.meta("end", to_string(p.end));
  for (std::size_t i = 0; i < p.r.size(); ++i) t.row() << p.r[i] << p.u[i] << p.du[i] << p.Q[i] << p.residual[i];
  return t;
}

CsvTable energy_table(const std::string& config_hash) {
  return CsvTable(config_hash, {"k", "lambda", "energy", "supnorm", "grad_norm", "band_occupied", "converged",
                                "iterations", "init"});
}

void append_report(CsvTable& table, const EnergyReport<double>& r) {
  table.row() << r.k << r.lambda << r.energy << r.supnorm << r.grad_norm << r.band_occupied() << r.converged
              << r.iterations << r.init;
}

CsvTable verification_table(const VerificationReport& rep, const std::string& config_hash) {
  CsvTable t(config_hash, {"check", "passed", "measured", "tolerance", "reference", "detail"});
  for (const auto& c : rep.checks) t.row() << c.name << c.passed << c.measured << c.tolerance << c.reference << c.detail;
  return t;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                           const std::vector<Series>& series, bool logx) {
  const double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  auto tx = [&](double x) { return logx ? std::log10(x) : x; };
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (logx && !(s.x[i] > 0))) continue;
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1;
  if (!(ymax > ymin)) ymax = ymin + 1;
  auto px = [&](double x) { return L + (tx(x) - xmin) / (xmax - xmin) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
     << "</text>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"12\">"
     << escape_xml(xlabel) << (logx ? " (log10)" : "") << "</text>\n";
  os << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 "
     << (T + H - B) / 2 << ")\" text-anchor=\"middle\">" << escape_xml(ylabel) << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4, fy = ymin + (ymax - ymin) * i / 4;
    const double sx = L + (W - L - R) * i / 4, sy = H - B - (H - T - B) * i / 4;
    os << "<text x=\"" << sx << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
       << format_number(std::round(fx * 1000) / 1000) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << sy + 4 << "\" text-anchor=\"end\" font-size=\"10\">"
       << format_number(std::round(fy * 1000) / 1000) << "</text>\n";
  }
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* color = kPalette[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (logx && !(s.x[i] > 0))) continue;
      os << px(s.x[i]) << "," << py(s.y[i]) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 14 * (k + 1) << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
       << color << "\">" << escape_xml(s.label) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_occupancy(const std::string& title, const std::vector<double>& lambdas,
                          const std::vector<std::vector<int>>& occupied, int first_band) {
  const double L = 70, T = 40, cw = std::max(6.0, 560.0 / std::max<std::size_t>(1, lambdas.size())), ch = 36;
  const double W = L + cw * double(lambdas.size()) + 20;
  const double H = T + ch * double(occupied.size()) + 50;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
     << "</text>\n";
  for (std::size_t b = 0; b < occupied.size(); ++b) {
    const double y = T + ch * double(b);
    os << "<text x=\"" << L - 8 << "\" y=\"" << y + ch / 2 + 4 << "\" text-anchor=\"end\" font-size=\"12\">k="
       << first_band + int(b) << "</text>\n";
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      os << "<rect x=\"" << L + cw * double(j) << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch - 2
         << "\" fill=\"" << (occupied[b][j] ? "#2ca02c" : "#eeeeee") << "\"/>\n";
    }
  }
  const double yb = T + ch * double(occupied.size()) + 16;
  os << "<text x=\"" << L << "\" y=\"" << yb << "\" font-size=\"10\">lambda=" << format_number(lambdas.front())
     << "</text>\n";
  os << "<text x=\"" << W - 20 << "\" y=\"" << yb << "\" text-anchor=\"end\" font-size=\"10\">lambda="
     << format_number(lambdas.back()) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace philap::app
