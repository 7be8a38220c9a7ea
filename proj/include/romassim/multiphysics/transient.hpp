#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "romassim/fields/field.hpp"
#include "romassim/multiphysics/coupling.hpp"
#include "romassim/multiphysics/schedule.hpp"
#include "romassim/neutronics/diffusion.hpp"
#include "romassim/reduction/snapshots.hpp"
#include "romassim/thermal/heat.hpp"

namespace romassim::multiphysics {

enum class Quantity { Diffusion, Absorption };

/// A temperature law applied to one quantity of one group. region = 0 means
/// every region; the reference value comes from the material table.
struct LawAssignment {
  Quantity quantity = Quantity::Absorption;
  std::size_t group = 0;
  int region = 0;
  CouplingKind kind = CouplingKind::LogarithmicANL;
  double gamma = 0.0;
};

enum class ParameterTarget { CouplingGamma, ReferenceValue };

/// A non-time parameter and what it overrides.
struct ParameterBinding {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  ParameterTarget target = ParameterTarget::CouplingGamma;
  Quantity quantity = Quantity::Absorption;
  std::size_t group = 0;
  int region = 0;  // 0 = every region
};

struct BenchmarkModel {
  std::string name;
  fields::MeshPtr mesh;
  neutronics::MaterialTable materials;  // reference values at t_ref
  thermal::ThermalProperties thermal;
  std::vector<LawAssignment> laws;
  TransientSchedule schedule;
  std::vector<ParameterBinding> parameters;
  double t_ref = 600.0;
  /// P0 in q''' = P0 sum_g Sigma_f,g phi_g.
  double power_scale = 1.0;
  /// Fission power of the initial critical state.
  double initial_power = 1.0;
  neutronics::KeffOptions keff;
  double fit_lo = 600.0;
  double fit_hi = 1200.0;
  std::size_t fit_samples = 601;
  double afom_energy = 1.0 - 1e-8;
  std::size_t afom_iterations = 2;
};

enum class Mode { FOM, AFOM, LCFOM };

Mode parse_mode(const std::string& name);
std::string to_string(Mode mode);

struct TransientOptions {
  double dt = 0.01;
  double t_end = 2.0;
  double sample_every = 0.01;
};

/// Per-cell materials as functions of temperature and time for one parameter
/// vector. With `linearized` every law is replaced by its least-squares line.
class MaterialEvaluator {
 public:
  MaterialEvaluator(const BenchmarkModel& model, const std::vector<double>& mu, bool linearized);

  neutronics::CellMaterials at(const Eigen::VectorXd& temperature, double t) const;
  const neutronics::CellMaterials& reference() const { return base_; }
  /// Law in force for (quantity, group, region).
  const CouplingLaw& law(Quantity q, std::size_t group, int region) const;

 private:
  TransientSchedule schedule_;
  fields::MeshPtr mesh_;
  neutronics::CellMaterials base_;
  std::map<std::tuple<int, std::size_t, int>, CouplingLaw> laws_;
  // Per group, the law of every cell.
  std::vector<std::vector<const CouplingLaw*>> diffusion_laws_;
  std::vector<std::vector<const CouplingLaw*>> absorption_laws_;
};

/// Throws ParameterOutOfRange when mu leaves the box.
void check_parameters(const BenchmarkModel& model, const std::vector<double>& mu);

/// Names of the parameters stored with each snapshot: "t" followed by the model parameters.
std::vector<std::string> snapshot_parameter_names(const BenchmarkModel& model);
std::vector<std::string> snapshot_field_names(const BenchmarkModel& model);

/// Runs one transient and returns T and phi_g sampled every options.sample_every,
/// starting with the initial state at t = 0.
reduction::SnapshotSet run_transient(const BenchmarkModel& model, Mode mode, const std::vector<double>& mu,
                                     const TransientOptions& options);

}  // namespace romassim::multiphysics
