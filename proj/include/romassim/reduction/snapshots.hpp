#pragma once

#include <Eigen/Core>
#include <map>
#include <string>
#include <vector>

#include "romassim/fields/field.hpp"

namespace romassim::reduction {

/// Collection of parametric snapshots on one mesh. Each snapshot carries a
/// parameter vector and one value vector per named field.
class SnapshotSet {
 public:
  SnapshotSet() = default;
  SnapshotSet(fields::MeshPtr mesh, std::vector<std::string> parameter_names);

  const fields::MeshPtr& mesh_ptr() const { return mesh_; }
  const std::vector<std::string>& parameter_names() const { return parameter_names_; }
  std::size_t size() const { return parameters_.size(); }
  bool empty() const { return parameters_.empty(); }

  void add(std::vector<double> parameters, const std::map<std::string, Eigen::VectorXd>& values);
  void append(const SnapshotSet& other);

  const std::vector<double>& parameters(std::size_t i) const { return parameters_.at(i); }
  std::vector<std::string> field_names() const;
  bool has_field(const std::string& name) const { return data_.count(name) > 0; }

  const Eigen::VectorXd& values(const std::string& field, std::size_t i) const;
  fields::ScalarField field(const std::string& field, std::size_t i) const;
  /// cells x size matrix of one field.
  Eigen::MatrixXd matrix(const std::string& field) const;

  SnapshotSet subset(const std::vector<std::size_t>& indices) const;

 private:
  const std::vector<Eigen::VectorXd>& column_list(const std::string& field) const;

  fields::MeshPtr mesh_;
  std::vector<std::string> parameter_names_;
  std::vector<std::vector<double>> parameters_;
  std::map<std::string, std::vector<Eigen::VectorXd>> data_;
};

}  // namespace romassim::reduction
