#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <memory>
#include <vector>

#include "romassim/fields/field.hpp"
#include "romassim/neutronics/materials.hpp"

namespace romassim::neutronics {

struct NeutronicState {
  std::vector<fields::ScalarField> flux;        // one per energy group
  std::vector<fields::ScalarField> precursors;  // one per delayed group
  double k_eff = 1.0;
  double time = 0.0;
};

/// Per-unit-volume loss operator of one group: leakage plus removal.
Eigen::SparseMatrix<double> assemble_group_operator(const fields::StructuredMesh& mesh,
                                                    const CellMaterials& cells, std::size_t group);

/// Cellwise sum_g nuSigma_f,g phi_g.
Eigen::VectorXd fission_source(const std::vector<fields::ScalarField>& flux, const CellMaterials& cells);

/// Integral of sum_g Sigma_f,g phi_g, with Sigma_f = nuSigma_f / 2.43.
double fission_power(const std::vector<fields::ScalarField>& flux, const CellMaterials& cells);

struct KeffOptions {
  double tol = 1e-10;
  std::size_t max_iter = 20000;
  /// Total fission power the flux is scaled to.
  double target_power = 1.0;
};

NeutronicState solve_keff(const fields::MeshPtr& mesh, const CellMaterials& cells, const KeffOptions& options = {});

/// Steady residual norm ||L phi - chi F phi / k - S phi|| (L2, all groups).
double steady_residual(const NeutronicState& state, const CellMaterials& cells);

/// Implicit Euler stepper. Keeps the factorization pattern between calls,
/// so reuse one instance for a whole transient.
class NeutronicsStepper {
 public:
  explicit NeutronicsStepper(fields::MeshPtr mesh, std::size_t direct_limit = 100000);

  NeutronicState advance(const NeutronicState& state, double dt, const CellMaterials& cells, double k_eff);

 private:
  fields::MeshPtr mesh_;
  std::size_t direct_limit_;
  bool analyzed_ = false;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

NeutronicState advance_neutronics(const NeutronicState& state, double dt, const CellMaterials& cells, double k_eff);

}  // namespace romassim::neutronics
