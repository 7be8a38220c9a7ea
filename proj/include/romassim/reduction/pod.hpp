#pragma once

#include <Eigen/Core>
#include <vector>

#include "romassim/fields/field.hpp"
#include "romassim/reduction/snapshots.hpp"

namespace romassim::reduction {

struct PodBasis {
  std::vector<fields::ScalarField> modes;
  /// All eigenvalues of the correlation matrix, descending, non-negative.
  Eigen::VectorXd eigenvalues;

  std::size_t size() const { return modes.size(); }
  const fields::MeshPtr& mesh_ptr() const { return modes.at(0).mesh_ptr(); }
  /// cells x N matrix of mode values.
  Eigen::MatrixXd matrix() const;
};

PodBasis compute_pod(const SnapshotSet& snapshots, const std::string& field, std::size_t n);
/// Same, from a cells x N_s matrix of snapshot values.
PodBasis compute_pod(const fields::MeshPtr& mesh, const Eigen::MatrixXd& snapshots, std::size_t n);

/// Smallest N whose eigenvalues retain at least `energy` of the total.
/// energy >= 1 returns the numerical rank.
std::size_t energy_rank(const Eigen::VectorXd& eigenvalues, double energy);

/// Number of eigenvalues above the rank threshold 1e-12 * lambda_1.
std::size_t numerical_rank(const Eigen::VectorXd& eigenvalues);

Eigen::VectorXd pod_project(const PodBasis& basis, const fields::ScalarField& u);
fields::ScalarField pod_reconstruct(const PodBasis& basis, const Eigen::VectorXd& alpha);

}  // namespace romassim::reduction
