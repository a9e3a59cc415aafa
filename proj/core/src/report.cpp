#include "kgs/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "kgs/error.hpp"

namespace kgs {

namespace fs = std::filesystem;

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string csv_cell(const Cell& c) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>) {
          return format_double(v);
        } else if constexpr (std::is_same_v<T, long long>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else {
          return v;
        }
      },
      c);
}

}  // namespace

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw InvalidArgument("row width does not match the header");
  rows.push_back(std::move(row));
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i].name << " [" << table.columns[i].unit << "]";
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

std::string to_plot_data(const std::string& x_label, const std::string& y_label,
                         const std::vector<std::pair<double, double>>& points) {
  std::ostringstream os;
  os << "# " << x_label << ' ' << y_label << '\n';
  for (const auto& [x, y] : points) os << format_double(x) << ' ' << format_double(y) << '\n';
  return os.str();
}

RunWriter::RunWriter(fs::path dir, std::string command, nlohmann::json config)
    : dir_(std::move(dir)), command_(std::move(command)), config_(std::move(config)),
      start_(std::chrono::steady_clock::now()) {
  fs::create_directories(dir_);
}

void RunWriter::write_file(const std::string& name, const std::string& content, const std::string& kind,
                           const std::string& description) {
  atomic_write(dir_ / name, content);
  files_.push_back({{"path", name}, {"kind", kind}, {"description", description}});
}

void RunWriter::write_csv(const std::string& name, const CsvTable& table, const std::string& description) {
  write_file(name, to_csv(table), "csv", description);
}

void RunWriter::write_plot(const std::string& name, const std::string& x_label, const std::string& y_label,
                           const std::vector<std::pair<double, double>>& points) {
  write_file(name, to_plot_data(x_label, y_label, points), "plot", y_label + " against " + x_label);
}

void RunWriter::write_text(const std::string& name, const std::string& content, const std::string& description) {
  write_file(name, content, "text", description);
}

void RunWriter::write_json(const std::string& name, const nlohmann::json& content, const std::string& description) {
  write_file(name, content.dump(2) + "\n", "json", description);
}

void RunWriter::add_stage(const std::string& name, bool converged, nlohmann::json detail) {
  all_converged_ = all_converged_ && converged;
  stages_.push_back({{"stage", name}, {"converged", converged}, {"detail", std::move(detail)}});
}

void RunWriter::finish(int exit_code, const std::string& error) {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json m{{"artifact", "kgs"},
                   {"version", version()},
                   {"command", command_},
                   {"config", config_},
                   {"wall_time_s", wall},
                   {"stages", stages_},
                   {"all_converged", all_converged_},
                   {"exit_code", exit_code},
                   {"files", files_}};
  if (!error.empty()) m["error"] = error;
  atomic_write(dir_ / "manifest.json", m.dump(2) + "\n");
}

std::string version() { return KGS_VERSION; }

}  // namespace kgs
