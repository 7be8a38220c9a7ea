#include "romassim/thermal/heat.hpp"

#include <string>

#include "romassim/error.hpp"
#include "romassim/fields/stencil.hpp"

namespace romassim::thermal {

void ThermalProperties::validate() const {
  for (const auto& [id, r] : regions)
    if (!(r.conductivity > 0.0) || !(r.density > 0.0) || !(r.heat_capacity > 0.0))
      throw Error(ErrorCode::InvalidArgument, "thermal properties of region " + std::to_string(id) + " must be positive");
  if (!(boundary_temperature > 0.0)) throw Error(ErrorCode::NonPositiveTemperature, "boundary temperature must be positive");
}

fields::ScalarField power_density(const std::vector<fields::ScalarField>& flux,
                                  const neutronics::CellMaterials& cells, double p0) {
  if (!(p0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "P0 must be positive");
  if (flux.size() != cells.energy_groups) throw Error(ErrorCode::SizeMismatch, "flux group count");
  fields::ScalarField q(flux.at(0).mesh_ptr());
  for (std::size_t g = 0; g < flux.size(); ++g)
    q.values() += (p0 / neutronics::kNeutronsPerFission) * cells.nu_fission[g].cwiseProduct(flux[g].values());
  return q;
}

HeatStepper::HeatStepper(fields::MeshPtr mesh, const ThermalProperties& props)
    : mesh_(std::move(mesh)), t_bc_(props.boundary_temperature) {
  props.validate();
  const auto n = static_cast<Eigen::Index>(mesh_->size());
  Eigen::VectorXd k(n);
  capacity_.resize(n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const int id = mesh_->region(static_cast<std::size_t>(c));
    auto it = props.regions.find(id);
    if (it == props.regions.end()) throw Error(ErrorCode::RegionGap, "no thermal data for region " + std::to_string(id));
    k[c] = it->second.conductivity;
    capacity_[c] = it->second.density * it->second.heat_capacity;
  }
  auto st = fields::diffusion_stencil(*mesh_, k);
  for (Eigen::Index c = 0; c < n; ++c) st.entries.emplace_back(c, c, st.diagonal[c]);
  conduction_.resize(n, n);
  conduction_.setFromTriplets(st.entries.begin(), st.entries.end());
  boundary_ = st.boundary;
}

void HeatStepper::factor(double dt) {
  if (dt == factored_dt_) return;
  Eigen::SparseMatrix<double> a = conduction_;
  if (dt > 0.0) {
    for (Eigen::Index c = 0; c < capacity_.size(); ++c) a.coeffRef(c, c) += capacity_[c] / dt;
  }
  solver_.compute(a);
  if (solver_.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "heat operator factorization failed");
  factored_dt_ = dt;
}

fields::ScalarField HeatStepper::advance(const fields::ScalarField& temperature, const fields::ScalarField& q,
                                         double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  fields::require_same_mesh(temperature, q);
  factor(dt);
  const Eigen::VectorXd rhs = capacity_.cwiseProduct(temperature.values()) / dt + q.values() + boundary_ * t_bc_;
  Eigen::VectorXd t = solver_.solve(rhs);
  if (solver_.info() != Eigen::Success || !t.allFinite()) throw Error(ErrorCode::SingularSystem, "heat solve failed");
  return fields::ScalarField(mesh_, std::move(t));
}

fields::ScalarField HeatStepper::steady(const fields::ScalarField& q) {
  if ((boundary_.array() == 0.0).all()) throw Error(ErrorCode::SingularSystem, "steady conduction needs a fixed-temperature edge");
  factor(0.0);
  Eigen::VectorXd t = solver_.solve(q.values() + boundary_ * t_bc_);
  if (solver_.info() != Eigen::Success || !t.allFinite()) throw Error(ErrorCode::SingularSystem, "heat solve failed");
  return fields::ScalarField(mesh_, std::move(t));
}

double HeatStepper::boundary_heat_flow(const fields::ScalarField& temperature) const {
  return boundary_.dot((temperature.values().array() - t_bc_).matrix()) * mesh_->cell_area();
}

fields::ScalarField advance_heat(const fields::ScalarField& temperature, const fields::ScalarField& q,
                                 const ThermalProperties& props, double dt) {
  HeatStepper stepper(temperature.mesh_ptr(), props);
  return stepper.advance(temperature, q, dt);
}

}  // namespace romassim::thermal
