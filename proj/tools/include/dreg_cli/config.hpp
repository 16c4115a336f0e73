#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dreg/bootstrap.hpp"
#include "dreg/csv.hpp"
#include "dreg/montecarlo.hpp"
#include "dreg/ortho_inference.hpp"

namespace dreg::cli {

struct GridSpec {
  /// Explicit grid; when empty, u_count points spread evenly over [u_min, u_max].
  std::vector<double> u_values;
  std::size_t u_count = 5;
  double u_min = 0.0;
  double u_max = 1.0;
  /// Empty selects every target column.
  std::vector<std::size_t> j_values;
};

struct ThresholdSpec {
  std::optional<double> y_lo;
  std::optional<double> y_hi;
  double q_lo = 0.05;
  double q_hi = 0.95;
};

struct McSpec {
  DesignSpec design;
  std::size_t reps = 200;
  std::vector<McMethod> methods{McMethod::ProposedOS, McMethod::ProposedDS, McMethod::NaiveMB,
                                McMethod::NaiveBF};
};

struct RunConfig {
  std::string data_path;
  /// Relative data paths resolve against this directory (the config file's).
  std::string base_dir;
  ColumnRoles roles;
  GridSpec grid;
  ThresholdSpec thresholds;
  InferenceConfig inference;
  std::size_t bootstrap_b = 5000;
  double alpha = 0.05;
  Method method = Method::OrthogonalScore;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out_dir = "dreg-out";
  McSpec mc;
};

/// Parses a config document; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& doc);
/// Reads a config file; its directory becomes base_dir.
RunConfig load_config(const std::string& path);

/// Everything that determines the output files: output location and thread
/// count are left out.
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

}  // namespace dreg::cli
