#pragma once

#include <Eigen/Core>
#include <map>
#include <vector>

#include "romassim/fields/mesh.hpp"

namespace romassim::neutronics {

/// Neutrons per fission used to recover Sigma_f from nu*Sigma_f.
inline constexpr double kNeutronsPerFission = 2.43;

struct GroupConstants {
  double diffusion = 1.0;   // D_g (cm)
  double absorption = 0.0;  // Sigma_a,g (1/cm)
  double nu_fission = 0.0;  // nu*Sigma_f,g (1/cm)
  double chi = 0.0;
  double buckling = 0.0;    // B^2_z,g (1/cm^2)
  double velocity = 1.0;    // v_g (cm/s)
};

struct RegionMaterial {
  std::vector<GroupConstants> groups;
  /// scatter(g, h) = Sigma_s,g->h for g != h; the diagonal is ignored.
  Eigen::MatrixXd scatter;
};

struct Kinetics {
  std::vector<double> beta;    // per precursor group
  std::vector<double> lambda;  // decay constants (1/s)
  double beta_total = 0.0;

  std::size_t groups() const { return beta.size(); }
};

struct MaterialTable {
  std::size_t energy_groups = 2;
  std::map<int, RegionMaterial> regions;
  Kinetics kinetics;

  /// Throws InvalidArgument if any invariant is violated.
  void validate() const;
  const RegionMaterial& region(int id) const;
};

/// Kinetics with beta_total computed from the per-group fractions.
Kinetics make_kinetics(std::vector<double> beta, std::vector<double> lambda);

/// Cross sections resolved per cell; the form consumed by the solvers.
struct CellMaterials {
  std::size_t energy_groups = 0;
  std::vector<Eigen::VectorXd> diffusion;
  std::vector<Eigen::VectorXd> absorption;
  std::vector<Eigen::VectorXd> nu_fission;
  std::vector<Eigen::VectorXd> chi;
  std::vector<Eigen::VectorXd> buckling;
  std::vector<Eigen::VectorXd> velocity;
  /// scatter[g][h] per cell, g -> h.
  std::vector<std::vector<Eigen::VectorXd>> scatter;
  Kinetics kinetics;

  std::size_t cells() const { return diffusion.empty() ? 0 : static_cast<std::size_t>(diffusion[0].size()); }
  bool has_upscatter() const;
};

CellMaterials resolve_cells(const fields::StructuredMesh& mesh, const MaterialTable& table);

}  // namespace romassim::neutronics
