#include "romassim/reduction/snapshots.hpp"

#include "romassim/error.hpp"

namespace romassim::reduction {

SnapshotSet::SnapshotSet(fields::MeshPtr mesh, std::vector<std::string> parameter_names)
    : mesh_(std::move(mesh)), parameter_names_(std::move(parameter_names)) {}

void SnapshotSet::add(std::vector<double> parameters, const std::map<std::string, Eigen::VectorXd>& values) {
  if (parameters.size() != parameter_names_.size())
    throw Error(ErrorCode::SizeMismatch, "parameter vector has the wrong length");
  if (!empty() && values.size() != data_.size())
    throw Error(ErrorCode::MissingField, "snapshot does not provide every field of the set");
  for (const auto& [name, v] : values) {
    if (static_cast<std::size_t>(v.size()) != mesh_->size())
      throw Error(ErrorCode::MeshMismatch, "snapshot field '" + name + "' does not match the mesh");
    if (!empty() && !data_.count(name)) throw Error(ErrorCode::MissingField, "unexpected field '" + name + "'");
  }
  for (const auto& [name, v] : values) data_[name].push_back(v);
  parameters_.push_back(std::move(parameters));
}

void SnapshotSet::append(const SnapshotSet& other) {
  if (other.empty()) return;
  if (!mesh_) *this = SnapshotSet(other.mesh_, other.parameter_names_);
  if (!mesh_->same_as(*other.mesh_)) throw Error(ErrorCode::MeshMismatch, "snapshot sets live on different meshes");
  if (other.parameter_names_ != parameter_names_) throw Error(ErrorCode::SizeMismatch, "parameter names differ");
  for (std::size_t i = 0; i < other.size(); ++i) {
    std::map<std::string, Eigen::VectorXd> values;
    for (const auto& [name, cols] : other.data_) values[name] = cols[i];
    add(other.parameters_[i], values);
  }
}

std::vector<std::string> SnapshotSet::field_names() const {
  std::vector<std::string> out;
  for (const auto& kv : data_) out.push_back(kv.first);
  return out;
}

const std::vector<Eigen::VectorXd>& SnapshotSet::column_list(const std::string& field) const {
  auto it = data_.find(field);
  if (it == data_.end()) throw Error(ErrorCode::MissingField, "no field '" + field + "' in snapshot set");
  return it->second;
}

const Eigen::VectorXd& SnapshotSet::values(const std::string& field, std::size_t i) const {
  return column_list(field).at(i);
}

fields::ScalarField SnapshotSet::field(const std::string& field, std::size_t i) const {
  return fields::ScalarField(mesh_, values(field, i));
}

Eigen::MatrixXd SnapshotSet::matrix(const std::string& field) const {
  const auto& cols = column_list(field);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(mesh_->size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = cols[i];
  return m;
}

SnapshotSet SnapshotSet::subset(const std::vector<std::size_t>& indices) const {
  SnapshotSet out(mesh_, parameter_names_);
  for (std::size_t i : indices) {
    if (i >= size()) throw Error(ErrorCode::InvalidArgument, "snapshot index out of range");
    std::map<std::string, Eigen::VectorXd> values;
    for (const auto& [name, cols] : data_) values[name] = cols[i];
    out.add(parameters_[i], values);
  }
  return out;
}

}  // namespace romassim::reduction
