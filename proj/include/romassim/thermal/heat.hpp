#pragma once

#include <Eigen/SparseCholesky>
#include <map>
#include <vector>

#include "romassim/fields/field.hpp"
#include "romassim/neutronics/materials.hpp"

namespace romassim::thermal {

struct ThermalRegion {
  double conductivity = 1.0;   // W/(cm K)
  double density = 1.0;        // g/cm^3
  double heat_capacity = 1.0;  // J/(g K)
};

struct ThermalProperties {
  std::map<int, ThermalRegion> regions;
  /// Temperature imposed on every non-symmetry edge (K).
  double boundary_temperature = 600.0;

  void validate() const;
};

/// q''' = P0 * sum_g Sigma_f,g phi_g.
fields::ScalarField power_density(const std::vector<fields::ScalarField>& flux,
                                  const neutronics::CellMaterials& cells, double p0);

/// Implicit Euler heat conduction. The operator does not depend on T, so the
/// factorization is reused while dt stays the same.
class HeatStepper {
 public:
  HeatStepper(fields::MeshPtr mesh, const ThermalProperties& props);

  fields::ScalarField advance(const fields::ScalarField& temperature, const fields::ScalarField& q, double dt);
  /// Solution of the stationary problem with source q.
  fields::ScalarField steady(const fields::ScalarField& q);
  /// Net heat leaving through the boundary (W per unit height).
  double boundary_heat_flow(const fields::ScalarField& temperature) const;

 private:
  void factor(double dt);

  fields::MeshPtr mesh_;
  double t_bc_;
  Eigen::SparseMatrix<double> conduction_;
  Eigen::VectorXd boundary_;
  Eigen::VectorXd capacity_;  // rho * c_p per cell
  double factored_dt_ = -1.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver_;
};

fields::ScalarField advance_heat(const fields::ScalarField& temperature, const fields::ScalarField& q,
                                 const ThermalProperties& props, double dt);

}  // namespace romassim::thermal
