#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kgs/minimize.hpp"

namespace kgs {

/// Invalid run configuration. The message names the field and, when it can
/// be located in the source text, the line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FockStudyConfig {
  int n_per_axis = 8;
  double box_length = 8.0;
  int n_modes = 3;
  int n_max = 4;
  std::vector<double> g_list{0.0, 0.05, 0.2};
  /// Coherent-state identity checks: random amplitudes with |f| <= f_max.
  int n_random = 50;
  double f_max = 0.5;
  int identity_n_max = 12;
};

struct StudyConfig {
  std::vector<double> g_list{0.05, 0.1, 0.2, 0.4};
  /// A negative entry stands for the grid's largest |k|.
  std::vector<double> lambda_list{2.0, 4.0, 8.0, 16.0, -1.0};
  std::vector<double> box_lengths{10.0, 20.0, 40.0};
  double spacing = 0.5;
  std::vector<double> kappa_list{0.0, 0.5};
  int n_trials = 200;
  int n_eigenbasis = 40;
  /// Second grid of the inequality refinement comparison (0: none).
  int refine_n_per_axis = 48;
  int n_starts = 8;
  double eigen_tol = 1e-10;
  /// Confining boost used by diagnose.
  double boost_c = 0.0;
  double boost_radius = 1.0;
  FockStudyConfig fock;
};

struct RunConfig {
  ModelSpec model;
  int n_per_axis = 48;
  double box_length = 14.0;
  MinimizeOptions minimize;
  StudyConfig study;
  std::string output_dir = "kgs_output";
  std::uint64_t seed = 1;
  int threads = 1;

  GridSpec grid() const { return make_grid(n_per_axis, box_length); }
};

/// Strict parse: unknown keys, wrong types and invalid values are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical JSON form of a configuration (every field present).
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace kgs
