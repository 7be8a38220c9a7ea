#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "romassim/reduction/pod.hpp"

namespace romassim::reduction {

/// POD with piecewise-multilinear interpolation of the modal coefficients
/// over a tensor grid of parameters.
struct PodiModel {
  PodBasis basis;
  /// Sorted distinct values per parameter dimension.
  std::vector<std::vector<double>> axes;
  /// N x (grid points); grid index with the first axis fastest.
  Eigen::MatrixXd coefficients;

  std::size_t size() const { return static_cast<std::size_t>(coefficients.rows()); }
};

struct PodiValue {
  fields::ScalarField field;
  Eigen::VectorXd coefficients;
  /// True when some coordinate fell outside the grid and was clamped.
  bool clamped = false;
};

PodiModel podi_train(const SnapshotSet& snapshots, const std::string& field, std::size_t n);

/// N chosen as the smallest rank keeping `energy` of the POD energy.
PodiModel podi_train_energy(const SnapshotSet& snapshots, const std::string& field, double energy);

/// Without compression: the snapshots themselves act as the basis, so the
/// interpolant is exact at every node.
PodiModel podi_train_lossless(const SnapshotSet& snapshots, const std::string& field);

/// Clamps outside the grid and flags it; with strict = true it throws instead.
PodiValue podi_eval(const PodiModel& model, const std::vector<double>& mu, bool strict = false);

/// Interpolated coefficients only.
Eigen::VectorXd podi_coefficients(const PodiModel& model, const std::vector<double>& mu, bool* clamped = nullptr);

}  // namespace romassim::reduction
