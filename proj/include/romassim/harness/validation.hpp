#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "romassim/geim/geim.hpp"
#include "romassim/harness/pipeline.hpp"
#include "romassim/pbdw/pbdw.hpp"
#include "romassim/reduction/snapshots.hpp"

namespace romassim::harness {

enum class Suite { Fast, Full };

Suite parse_suite(const std::string& name);

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  Suite suite = Suite::Fast;
  /// Scratch directory for pipeline runs.
  std::filesystem::path work_dir;
  /// Directory holding the benchmark configs.
  std::filesystem::path config_dir;
  Logger log;
};

/// Fast: the analytic and structural checks (1-6, 10, 12 on a tiny case).
/// Full: adds the IAEA and TWIGL-A pipelines (7, 8, 9, 11) and repeats the
/// structural checks on the models those pipelines train.
std::vector<CheckResult> run_acceptance(const ValidationOptions& options);

/// "[PASS] 3 name: detail (1.2 s)"
std::string format_check(const CheckResult& result);

// Building blocks, also used by the unit tests.

struct GeimStructure {
  double upper = 0.0;           // max |B(i, j)|, j > i
  double diagonal = 0.0;        // max |B(i, i) - 1|
  double off_diagonal = 0.0;    // max |B(i, j)|, i != j
  double reconstruction = 0.0;  // max relative error of magic snapshots
};

GeimStructure geim_structure(const geim::GeimModel& model, const reduction::SnapshotSet& train,
                             const std::string& field);

struct PodIdentity {
  double discarded = 0.0;   // sum of eigenvalues past N
  double projection = 0.0;  // sum of squared projection errors
  double orthonormality = 0.0;

  double relative_gap() const;
};

PodIdentity pod_identity(const reduction::SnapshotSet& train, const std::string& field, std::size_t n);

/// Max relative difference between GEIM(M = N) and PBDW(xi = 0) on the
/// given truths, with PBDW built on the first N magic functions and sensors.
double pbdw_geim_gap(const geim::GeimModel& model, std::size_t n, const std::vector<fields::ScalarField>& truths);

/// Smallest ||P_U z|| / ||z|| over span(z) found by random search.
double brute_force_inf_sup(const std::vector<fields::ScalarField>& z, const std::vector<fields::ScalarField>& u,
                           std::uint64_t seed, std::size_t restarts = 64, std::size_t steps = 400);

/// Largest decrease of beta_{n,m} along m over every row of the table.
double inf_sup_drop(const pbdw::PbdwModel& model);

/// Max |table - brute force| over a few (n, m) pairs.
double inf_sup_spot_gap(const pbdw::PbdwModel& model, std::uint64_t seed);

/// Final-time errors of implicit Euler at dt, dt/2, dt/4.
std::vector<double> heat_decay_errors(double dt);
std::vector<double> precursor_decay_errors(double dt);

}  // namespace romassim::harness
