#include "romassim/fields/field.hpp"

#include <cmath>

#include "romassim/error.hpp"

namespace romassim::fields {

ScalarField::ScalarField(MeshPtr mesh, double fill)
    : mesh_(std::move(mesh)),
      values_(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(mesh_->size()), fill)) {}

ScalarField::ScalarField(MeshPtr mesh, Eigen::VectorXd values)
    : mesh_(std::move(mesh)), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != mesh_->size())
    throw Error(ErrorCode::SizeMismatch, "field value count differs from mesh cell count");
}

void require_same_mesh(const ScalarField& f, const ScalarField& g) {
  if (!f.mesh_ptr() || !g.mesh_ptr() || !f.mesh().same_as(g.mesh()))
    throw Error(ErrorCode::MeshMismatch, "fields live on different meshes");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_mesh(*this, other);
  values_ += other.values_;
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_mesh(*this, other);
  values_ -= other.values_;
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  values_ *= s;
  return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
  require_same_mesh(*this, x);
  values_ += a * x.values_;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double inner_product(const ScalarField& f, const ScalarField& g) {
  require_same_mesh(f, g);
  return f.values().dot(g.values()) * f.mesh().cell_area();
}

double reduce_field(const ScalarField& f, Reduction kind) {
  const double area = f.mesh().cell_area();
  switch (kind) {
    case Reduction::L1Norm: return f.values().cwiseAbs().sum() * area;
    case Reduction::L2Norm: return std::sqrt(f.values().squaredNorm() * area);
    case Reduction::Integral: return f.values().sum() * area;
  }
  return 0.0;
}

ScalarField region_indicator(const MeshPtr& mesh, int region) {
  ScalarField out(mesh);
  for (std::size_t c = 0; c < mesh->size(); ++c) out[c] = mesh->region(c) == region ? 1.0 : 0.0;
  return out;
}

}  // namespace romassim::fields
