#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "romassim/multiphysics/transient.hpp"
#include "romassim/sensing/sensors.hpp"

namespace romassim::harness {

/// A time window (lo, hi], or [lo, hi] when include_lo is set.
struct TimeWindow {
  double lo = 0.0;
  double hi = 1.0;
  bool include_lo = false;

  bool contains(double t) const;
};

struct ReductionSettings {
  std::size_t geim_m_max = 15;
  double geim_tolerance = 0.0;
  std::size_t pbdw_n = 5;
  std::size_t pbdw_m_max = 15;
  std::vector<double> xi_grid;
  /// Every k-th predict snapshot goes into the xi validation subset.
  std::size_t validation_stride = 10;
};

struct OnlineSettings {
  std::uint64_t seed = 20240101;
  std::size_t uq_draws = 100;
  double uq_level = 0.95;
  std::size_t noise_draws = 50;
  /// Sensor counts at which global outputs and bands are reported; 0 = M_max.
  std::size_t report_m = 0;
};

/// Everything one benchmark experiment needs, as loaded from a config file.
struct BenchmarkCase {
  std::string name;
  multiphysics::BenchmarkModel model;
  multiphysics::Mode truth_mode = multiphysics::Mode::FOM;
  multiphysics::Mode training_mode = multiphysics::Mode::AFOM;
  multiphysics::TransientOptions transient;
  TimeWindow train_window;
  TimeWindow test_window;
  /// Non-time parameter vectors (empty vectors when time is the only parameter).
  std::vector<std::vector<double>> train_mu;
  std::vector<std::vector<double>> test_mu;
  std::vector<std::string> fields;
  std::map<std::string, double> noise;
  std::size_t sensor_stride = 5;
  double sensor_spread = 1.0;
  ReductionSettings reduction;
  OnlineSettings online;
  nlohmann::json config;  // the document this case was built from

  double sigma(const std::string& field) const;
  sensing::SensorLibrary sensor_library() const;
};

BenchmarkCase load_case(const std::filesystem::path& path);
/// base_dir resolves relative file names (geometry masks).
BenchmarkCase parse_case(const nlohmann::json& config, const std::filesystem::path& base_dir);

/// Values lo, lo + step, ... up to hi (inclusive within round-off).
std::vector<double> stride_range(double lo, double step, double hi);
std::vector<double> linspace(double lo, double hi, std::size_t count);

}  // namespace romassim::harness
