#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace kgs {

/// Column of a CSV table: name and unit ("1" for dimensionless).
struct Column {
  std::string name;
  std::string unit;
};

using Cell = std::variant<double, long long, bool, std::string>;

/// Doubles are written with 17 significant digits (exact round trip).
struct CsvTable {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
};

std::string format_double(double x);

/// Header "name [unit],..." then one line per row.
std::string to_csv(const CsvTable& table);

/// Two whitespace-separated columns with a '#' header naming both.
std::string to_plot_data(const std::string& x_label, const std::string& y_label,
                         const std::vector<std::pair<double, double>>& points);

/// Collects the files of one run and writes the manifest last.
class RunWriter {
 public:
  RunWriter(std::filesystem::path dir, std::string command, nlohmann::json config);

  const std::filesystem::path& dir() const noexcept { return dir_; }

  void write_csv(const std::string& name, const CsvTable& table, const std::string& description);
  void write_plot(const std::string& name, const std::string& x_label, const std::string& y_label,
                  const std::vector<std::pair<double, double>>& points);
  void write_text(const std::string& name, const std::string& content, const std::string& description);
  void write_json(const std::string& name, const nlohmann::json& content, const std::string& description);

  /// Per-stage convergence summary.
  void add_stage(const std::string& name, bool converged, nlohmann::json detail = nlohmann::json::object());
  bool all_converged() const noexcept { return all_converged_; }

  /// Writes manifest.json atomically (temporary file then rename).
  void finish(int exit_code, const std::string& error = "");

 private:
  void write_file(const std::string& name, const std::string& content, const std::string& kind,
                  const std::string& description);

  std::filesystem::path dir_;
  std::string command_;
  nlohmann::json config_;
  nlohmann::json files_ = nlohmann::json::array();
  nlohmann::json stages_ = nlohmann::json::array();
  bool all_converged_ = true;
  std::chrono::steady_clock::time_point start_;
};

/// Library version string.
std::string version();

}  // namespace kgs
