#ifndef PHILAP_APP_OUTPUT_HPP
#define PHILAP_APP_OUTPUT_HPP

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "philap/philap.hpp"

namespace philap::app {

/// Buffered CSV table. Files start with "# config_hash=<hex>", then one
/// "# key=value" line per metadata entry, then the header row. Numbers are
/// written with 17 significant digits so identical runs give identical bytes.
class CsvTable {
 public:
  CsvTable(std::string config_hash, std::vector<std::string> columns);

  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, double value);
  CsvTable& row();
  CsvTable& operator<<(double v);
  CsvTable& operator<<(long v);
  CsvTable& operator<<(int v) { return *this << long(v); }
  CsvTable& operator<<(bool v) { return *this << long(v ? 1 : 0); }
  CsvTable& operator<<(const std::string& v);

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::string hash_;
  std::vector<std::string> columns_;
  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double v);

/// Parsed CSV: metadata comment lines and numeric columns by name.
struct CsvData {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<double> column(const std::string& name) const;
};

CsvData read_csv(const std::filesystem::path& path);

/// Nodal dump of a grid function: x,u (interval) / x,y,u (rectangle) / r,u (ball).
CsvTable nodal_table(const GridFunction& u, const std::string& config_hash);

/// Rebuilds a grid function on `domain` from a nodal dump; the cell count is
/// inferred from the number of rows.
GridFunction grid_from_csv(const CsvData& data, const Domain<double>& domain);

CsvTable profile_table(const RadialProfile<double>& p, const std::string& config_hash);
CsvTable energy_table(const std::string& config_hash);
void append_report(CsvTable& table, const EnergyReport<double>& r);
CsvTable verification_table(const VerificationReport& rep, const std::string& config_hash);

/// Static SVG line chart.
struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

std::string svg_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                           const std::vector<Series>& series, bool logx = false);

/// Band-occupancy heat map: one row per band, one column per lambda.
std::string svg_occupancy(const std::string& title, const std::vector<double>& lambdas,
                          const std::vector<std::vector<int>>& occupied, int first_band);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace philap::app

#endif  // PHILAP_APP_OUTPUT_HPP
