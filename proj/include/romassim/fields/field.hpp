#pragma once

#include <Eigen/Core>
#include <memory>

#include "romassim/fields/mesh.hpp"

namespace romassim::fields {

using MeshPtr = std::shared_ptr<const StructuredMesh>;

/// Cell-valued function on a mesh. Values are stored x fastest.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(MeshPtr mesh, double fill = 0.0);
  ScalarField(MeshPtr mesh, Eigen::VectorXd values);

  const MeshPtr& mesh_ptr() const { return mesh_; }
  const StructuredMesh& mesh() const { return *mesh_; }
  std::size_t size() const { return static_cast<std::size_t>(values_.size()); }

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator[](std::size_t cell) const { return values_[static_cast<Eigen::Index>(cell)]; }
  double& operator[](std::size_t cell) { return values_[static_cast<Eigen::Index>(cell)]; }

  bool all_finite() const { return values_.allFinite(); }

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);
  /// this += a * x
  ScalarField& axpy(double a, const ScalarField& x);

 private:
  MeshPtr mesh_;
  Eigen::VectorXd values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

enum class Reduction { L1Norm, L2Norm, Integral };

void require_same_mesh(const ScalarField& f, const ScalarField& g);

/// L2 scalar product with midpoint quadrature.
double inner_product(const ScalarField& f, const ScalarField& g);
double reduce_field(const ScalarField& f, Reduction kind);
inline double l2_norm(const ScalarField& f) { return reduce_field(f, Reduction::L2Norm); }

/// Field whose cell values are f(x_center, y_center).
template <typename Fn>
ScalarField sample_field(const MeshPtr& mesh, Fn&& fn) {
  ScalarField out(mesh);
  for (std::size_t j = 0; j < mesh->ny(); ++j)
    for (std::size_t i = 0; i < mesh->nx(); ++i)
      out[mesh->index(i, j)] = fn(mesh->x_center(i), mesh->y_center(j));
  return out;
}

/// 1 on cells of `region`, 0 elsewhere.
ScalarField region_indicator(const MeshPtr& mesh, int region);

}  // namespace romassim::fields
