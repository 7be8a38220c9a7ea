#include "romassim/multiphysics/transient.hpp"

#include <cmath>

#include "romassim/error.hpp"
#include "romassim/reduction/podi.hpp"

namespace romassim::multiphysics {

Mode parse_mode(const std::string& name) {
  if (name == "fom" || name == "FOM") return Mode::FOM;
  if (name == "afom" || name == "AFOM") return Mode::AFOM;
  if (name == "lcfom" || name == "LCFOM") return Mode::LCFOM;
  throw Error(ErrorCode::Config, "unknown mode '" + name + "'");
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::FOM: return "fom";
    case Mode::AFOM: return "afom";
    case Mode::LCFOM: return "lcfom";
  }
  return "fom";
}

namespace {

bool binding_matches(const ParameterBinding& b, Quantity q, std::size_t group, int region) {
  return b.quantity == q && b.group == group && (b.region == 0 || b.region == region);
}

double& reference_slot(neutronics::MaterialTable& table, Quantity q, std::size_t group, int region) {
  auto& gc = table.regions.at(region).groups.at(group);
  return q == Quantity::Diffusion ? gc.diffusion : gc.absorption;
}

}  // namespace

void check_parameters(const BenchmarkModel& model, const std::vector<double>& mu) {
  if (mu.size() != model.parameters.size())
    throw Error(ErrorCode::ParameterOutOfRange, "expected " + std::to_string(model.parameters.size()) + " parameters");
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& b = model.parameters[i];
    const double slack = 1e-9 * std::max(std::abs(b.lo), std::abs(b.hi));
    if (!(mu[i] >= b.lo - slack && mu[i] <= b.hi + slack))
      throw Error(ErrorCode::ParameterOutOfRange, "parameter " + b.name + " outside its box");
  }
}

MaterialEvaluator::MaterialEvaluator(const BenchmarkModel& model, const std::vector<double>& mu, bool linearized)
    : schedule_(model.schedule), mesh_(model.mesh) {
  check_parameters(model, mu);
  neutronics::MaterialTable table = model.materials;
  const std::size_t G = table.energy_groups;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& b = model.parameters[i];
    if (b.target != ParameterTarget::ReferenceValue) continue;
    for (auto& [id, m] : table.regions)
      if (b.region == 0 || b.region == id) reference_slot(table, b.quantity, b.group, id) = mu[i];
  }

  for (const auto& [id, m] : table.regions) {
    for (std::size_t g = 0; g < G; ++g) {
      for (Quantity q : {Quantity::Diffusion, Quantity::Absorption}) {
        const double ref = reference_slot(table, q, g, id);
        CouplingLaw law = CouplingLaw::constant(ref);
        for (const auto& a : model.laws) {
          if (a.quantity != q || a.group != g || (a.region != 0 && a.region != id)) continue;
          double gamma = a.gamma;
          for (std::size_t i = 0; i < mu.size(); ++i)
            if (model.parameters[i].target == ParameterTarget::CouplingGamma && binding_matches(model.parameters[i], q, g, id))
              gamma = mu[i];
          law = CouplingLaw::nonlinear(a.kind, ref, gamma, model.t_ref);
        }
        if (linearized) law = fit_linear_coupling(law, model.fit_lo, model.fit_hi, model.fit_samples);
        laws_[{static_cast<int>(q), g, id}] = law;
      }
    }
  }

  base_ = neutronics::resolve_cells(*mesh_, table);
  diffusion_laws_.assign(G, std::vector<const CouplingLaw*>(mesh_->size()));
  absorption_laws_.assign(G, std::vector<const CouplingLaw*>(mesh_->size()));
  for (std::size_t c = 0; c < mesh_->size(); ++c) {
    const int id = mesh_->region(c);
    for (std::size_t g = 0; g < G; ++g) {
      diffusion_laws_[g][c] = &law(Quantity::Diffusion, g, id);
      absorption_laws_[g][c] = &law(Quantity::Absorption, g, id);
    }
  }
}

const CouplingLaw& MaterialEvaluator::law(Quantity q, std::size_t group, int region) const {
  auto it = laws_.find({static_cast<int>(q), group, region});
  if (it == laws_.end()) throw Error(ErrorCode::RegionGap, "no coupling law for region " + std::to_string(region));
  return it->second;
}

neutronics::CellMaterials MaterialEvaluator::at(const Eigen::VectorXd& temperature, double t) const {
  if (static_cast<std::size_t>(temperature.size()) != mesh_->size())
    throw Error(ErrorCode::SizeMismatch, "temperature does not match the mesh");
  neutronics::CellMaterials cells = base_;
  const std::size_t G = cells.energy_groups;
  std::map<std::pair<int, std::size_t>, double> factors;
  for (int id : mesh_->region_ids())
    for (std::size_t g = 0; g < G; ++g) factors[{id, g}] = transient_factor(schedule_, id, g, t);
  for (std::size_t c = 0; c < mesh_->size(); ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    const double temp = temperature[ci];
    for (std::size_t g = 0; g < G; ++g) {
      cells.diffusion[g][ci] = coupling_eval(*diffusion_laws_[g][c], temp);
      cells.absorption[g][ci] = coupling_eval_scaled(*absorption_laws_[g][c], temp, factors[{mesh_->region(c), g}]);
    }
  }
  return cells;
}

std::vector<std::string> snapshot_parameter_names(const BenchmarkModel& model) {
  std::vector<std::string> names{"t"};
  for (const auto& b : model.parameters) names.push_back(b.name);
  return names;
}

std::vector<std::string> snapshot_field_names(const BenchmarkModel& model) {
  std::vector<std::string> names{"T"};
  for (std::size_t g = 0; g < model.materials.energy_groups; ++g) names.push_back("phi" + std::to_string(g + 1));
  return names;
}

namespace {

struct Timeline {
  std::vector<double> times;  // every step, times[0] = 0
  std::size_t stride = 1;
};

Timeline make_timeline(const TransientOptions& o) {
  if (!(o.dt > 0.0) || !(o.t_end > 0.0) || !(o.sample_every > 0.0))
    throw Error(ErrorCode::InvalidArgument, "dt, t_end and sample interval must be positive");
  Timeline tl;
  const auto steps = static_cast<std::size_t>(std::llround(o.t_end / o.dt));
  const auto stride = static_cast<std::size_t>(std::llround(o.sample_every / o.dt));
  if (steps == 0 || stride == 0 || std::abs(static_cast<double>(stride) * o.dt - o.sample_every) > 1e-9 * o.sample_every)
    throw Error(ErrorCode::InvalidArgument, "sample interval must be a multiple of dt");
  tl.stride = stride;
  for (std::size_t n = 0; n <= steps; ++n) tl.times.push_back(static_cast<double>(n) * o.dt);
  return tl;
}

std::vector<double> with_time(double t, const std::vector<double>& mu) {
  std::vector<double> p{t};
  p.insert(p.end(), mu.begin(), mu.end());
  return p;
}

std::map<std::string, Eigen::VectorXd> pack(const Eigen::VectorXd& temperature, const neutronics::NeutronicState& s) {
  std::map<std::string, Eigen::VectorXd> out{{"T", temperature}};
  for (std::size_t g = 0; g < s.flux.size(); ++g) out["phi" + std::to_string(g + 1)] = s.flux[g].values();
  return out;
}

class Driver {
 public:
  Driver(const BenchmarkModel& model, Mode mode, const std::vector<double>& mu, const TransientOptions& options)
      : model_(model), mu_(mu), eval_(model, mu, mode == Mode::LCFOM), timeline_(make_timeline(options)),
        dt_(options.dt), t0_(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(model.mesh->size()), model.t_ref)) {
    neutronics::KeffOptions ko = model.keff;
    ko.target_power = model.initial_power;
    initial_ = neutronics::solve_keff(model.mesh, eval_.at(t0_, 0.0), ko);
  }

  reduction::SnapshotSet coupled() {
    reduction::SnapshotSet out(model_.mesh, snapshot_parameter_names(model_));
    neutronics::NeutronicsStepper nstep(model_.mesh);
    thermal::HeatStepper hstep(model_.mesh, model_.thermal);
    neutronics::NeutronicState state = initial_;
    fields::ScalarField temp(model_.mesh, t0_);
    out.add(with_time(0.0, mu_), pack(temp.values(), state));
    for (std::size_t n = 0; n + 1 < timeline_.times.size(); ++n) {
      const double t1 = timeline_.times[n + 1];
      const auto cells = eval_.at(temp.values(), t1);
      state = nstep.advance(state, dt_, cells, initial_.k_eff);
      const auto q = thermal::power_density(state.flux, cells, model_.power_scale);
      temp = hstep.advance(temp, q, dt_);
      if ((n + 1) % timeline_.stride == 0) out.add(with_time(t1, mu_), pack(temp.values(), state));
    }
    return out;
  }

  reduction::SnapshotSet approximated() {
    // Iteration 0 sees a uniform reference temperature.
    std::vector<Eigen::VectorXd> temps(timeline_.times.size(), t0_);
    std::vector<neutronics::NeutronicState> samples;
    auto power = neutronics_pass(temps, samples);
    for (std::size_t it = 0; it < model_.afom_iterations; ++it) {
      temps = thermal_pass(surrogate(power, "q"));
      temps = surrogate(temps, "T");
      power = neutronics_pass(temps, samples);
    }
    temps = thermal_pass(surrogate(power, "q"));

    reduction::SnapshotSet out(model_.mesh, snapshot_parameter_names(model_));
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const std::size_t n = k * timeline_.stride;
      out.add(with_time(timeline_.times[n], mu_), pack(temps[n], samples[k]));
    }
    return out;
  }

 private:
  /// Neutronics against a prescribed temperature history; returns q''' at every step.
  std::vector<Eigen::VectorXd> neutronics_pass(const std::vector<Eigen::VectorXd>& temps,
                                               std::vector<neutronics::NeutronicState>& samples) {
    neutronics::NeutronicsStepper nstep(model_.mesh);
    neutronics::NeutronicState state = initial_;
    samples.assign(1, state);
    std::vector<Eigen::VectorXd> q;
    q.push_back(thermal::power_density(state.flux, eval_.at(temps[0], 0.0), model_.power_scale).values());
    for (std::size_t n = 0; n + 1 < timeline_.times.size(); ++n) {
      const auto cells = eval_.at(temps[n], timeline_.times[n + 1]);
      state = nstep.advance(state, dt_, cells, initial_.k_eff);
      q.push_back(thermal::power_density(state.flux, cells, model_.power_scale).values());
      if ((n + 1) % timeline_.stride == 0) samples.push_back(state);
    }
    return q;
  }

  std::vector<Eigen::VectorXd> thermal_pass(const std::vector<Eigen::VectorXd>& q) {
    thermal::HeatStepper hstep(model_.mesh, model_.thermal);
    std::vector<Eigen::VectorXd> temps{t0_};
    fields::ScalarField temp(model_.mesh, t0_);
    for (std::size_t n = 0; n + 1 < timeline_.times.size(); ++n) {
      temp = hstep.advance(temp, fields::ScalarField(model_.mesh, q[n + 1]), dt_);
      temps.push_back(temp.values());
    }
    return temps;
  }

  /// POD-I over time of a history, evaluated back at the step times.
  std::vector<Eigen::VectorXd> surrogate(const std::vector<Eigen::VectorXd>& history, const std::string& name) {
    reduction::SnapshotSet set(model_.mesh, {"t"});
    for (std::size_t n = 0; n < history.size(); ++n) set.add({timeline_.times[n]}, {{name, history[n]}});
    const auto podi = model_.afom_energy >= 1.0 ? reduction::podi_train_lossless(set, name)
                                                : reduction::podi_train_energy(set, name, model_.afom_energy);
    std::vector<Eigen::VectorXd> out;
    for (double t : timeline_.times) out.push_back(reduction::podi_eval(podi, {t}).field.values());
    return out;
  }

  const BenchmarkModel& model_;
  std::vector<double> mu_;
  MaterialEvaluator eval_;
  Timeline timeline_;
  double dt_;
  Eigen::VectorXd t0_;
  neutronics::NeutronicState initial_;
};

}  // namespace

reduction::SnapshotSet run_transient(const BenchmarkModel& model, Mode mode, const std::vector<double>& mu,
                                     const TransientOptions& options) {
  if (!model.mesh) throw Error(ErrorCode::InvalidArgument, "benchmark has no mesh");
  Driver driver(model, mode, mu, options);
  return mode == Mode::AFOM ? driver.approximated() : driver.coupled();
}

}  // namespace romassim::multiphysics
