#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "romassim/geim/geim.hpp"
#include "romassim/harness/benchmark.hpp"
#include "romassim/harness/metrics.hpp"
#include "romassim/pbdw/pbdw.hpp"
#include "romassim/reduction/snapshots.hpp"

namespace romassim::harness {

using Logger = std::function<void(const std::string&)>;

/// Training set, FOM truth on the test grid, and the training model on the test grid.
struct SnapshotBundle {
  reduction::SnapshotSet train;
  reduction::SnapshotSet truth;
  reduction::SnapshotSet baseline;
};

SnapshotBundle generate_snapshots(const BenchmarkCase& bc, const Logger& log = {});

/// Keeps the snapshots of `set` whose time lies in the window.
reduction::SnapshotSet filter_window(const reduction::SnapshotSet& set, const TimeWindow& window);

struct OfflineModels {
  std::map<std::string, geim::GeimModel> geim;
  std::map<std::string, pbdw::PbdwModel> pbdw;
};

OfflineModels build_offline(const BenchmarkCase& bc, const reduction::SnapshotSet& train, const Logger& log = {});

/// Per-M errors of one GEIM model over noisy measurements (y[i] holds the
/// readings of all magic sensors for truth i). lambda < 0 selects plain GEIM.
std::vector<ErrorPair> geim_curve(const geim::GeimModel& model, const std::vector<fields::ScalarField>& truths,
                                  const std::vector<Eigen::VectorXd>& y, double lambda);

struct PbdwCurve {
  std::vector<ErrorPair> errors;  // M = 1..M_max
  std::vector<double> xi;
};

/// Per-M PBDW errors with xi tuned on every `validation_stride`-th truth.
PbdwCurve pbdw_curve(const pbdw::PbdwModel& model, const std::vector<fields::ScalarField>& truths,
                     const std::vector<Eigen::VectorXd>& y, const std::vector<double>& xi_grid,
                     std::size_t validation_stride);

/// Noisy readings of every truth snapshot on `sensors`; truth i uses stream
/// derive_seed(seed, i).
std::vector<Eigen::VectorXd> noisy_readings(const std::vector<fields::ScalarField>& truths,
                                            const sensing::SensorLibrary& sensors, double sigma, std::uint64_t seed);

struct FieldReport {
  std::string field;
  double sigma = 0.0;
  ErrorPair baseline;
  std::vector<ErrorPair> geim;    // index M - 1
  std::vector<ErrorPair> trgeim;
  std::vector<ErrorPair> pbdw;
  std::vector<double> xi;
  std::vector<double> geim_training;  // max training error, m = 0..M
  std::vector<double> inf_sup;        // beta after each SGreedy pick
  double noise_geim = 0.0;            // mean eps at M_max over the noise draws
  double noise_trgeim = 0.0;
};

struct ReconstructionReport {
  std::string benchmark;
  std::string training_label;  // "afom" or "lcfom"
  std::size_t m_max = 0;
  std::size_t report_m = 0;
  std::size_t noise_draws = 0;
  std::vector<std::string> parameter_names;
  std::vector<std::vector<double>> parameters;  // of the truth snapshots
  std::vector<FieldReport> fields;
  GlobalOutputs truth, baseline, trgeim, pbdw;
  PercentileBand trgeim_power, pbdw_power, trgeim_temperature, pbdw_temperature;
  reduction::SnapshotSet truth_set;
  /// truth - estimate at report_m, for every truth snapshot.
  reduction::SnapshotSet trgeim_residual;
  reduction::SnapshotSet pbdw_residual;
  reduction::SnapshotSet trgeim_estimate;
  reduction::SnapshotSet pbdw_estimate;

  const FieldReport& field(const std::string& name) const;
};

struct OnlineOptions {
  double sigma_scale = 1.0;
  bool uq = true;
  bool noise_study = true;
};

ReconstructionReport run_online(const BenchmarkCase& bc, const SnapshotBundle& snaps, const OfflineModels& models,
                                const OnlineOptions& options = {}, const Logger& log = {});

/// CSV tables, SVG charts, residual containers and final-time field dumps.
void write_report(const std::filesystem::path& dir, const ReconstructionReport& report);

struct PipelineOptions {
  std::filesystem::path out;
  /// Reuse snapshot and model stages already on disk for the same config.
  bool reuse = true;
  OnlineOptions online;
  Logger log;
};

struct PipelineResult {
  ReconstructionReport report;
  std::map<std::string, double> stage_seconds;
};

/// generate -> offline -> online -> report. Stage failures are rethrown with the stage name.
PipelineResult run_pipeline(const BenchmarkCase& bc, const PipelineOptions& options);

}  // namespace romassim::harness
