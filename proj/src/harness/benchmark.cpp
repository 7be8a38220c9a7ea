#include "romassim/harness/benchmark.hpp"

#include <cmath>
#include <fstream>

#include "romassim/error.hpp"
#include "romassim/pbdw/pbdw.hpp"

namespace romassim::harness {

using nlohmann::json;

bool TimeWindow::contains(double t) const {
  const double eps = 1e-9 * std::max(1.0, std::abs(hi));
  if (t > hi + eps) return false;
  return include_lo ? t >= lo - eps : t > lo + eps;
}

double BenchmarkCase::sigma(const std::string& field) const {
  auto it = noise.find(field);
  return it == noise.end() ? 0.0 : it->second;
}

sensing::SensorLibrary BenchmarkCase::sensor_library() const {
  return sensing::build_sensor_library(model.mesh, sensor_stride, sensor_spread);
}

std::vector<double> stride_range(double lo, double step, double hi) {
  if (!(step > 0.0)) throw Error(ErrorCode::Config, "range step must be positive");
  std::vector<double> out;
  const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
  for (long long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {lo};
  std::vector<double> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  return out;
}

namespace {

template <typename T>
T get(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw Error(ErrorCode::Config, where + ": missing '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, where + "." + key + ": " + e.what());
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::size_t group_index(int group, std::size_t groups, const std::string& where) {
  if (group < 1 || static_cast<std::size_t>(group) > groups) throw Error(ErrorCode::Config, where + ": group out of range");
  return static_cast<std::size_t>(group - 1);
}

multiphysics::Quantity parse_quantity(const std::string& s) {
  if (s == "diffusion") return multiphysics::Quantity::Diffusion;
  if (s == "absorption") return multiphysics::Quantity::Absorption;
  throw Error(ErrorCode::Config, "unknown quantity '" + s + "'");
}

std::vector<double> parse_values(const json& j, const std::string& where) {
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.contains("values")) return j.at("values").get<std::vector<double>>();
  if (j.contains("count")) return linspace(get<double>(j, "lo", where), get<double>(j, "hi", where), get<std::size_t>(j, "count", where));
  if (j.contains("step")) return stride_range(get<double>(j, "lo", where), get<double>(j, "step", where), get<double>(j, "hi", where));
  throw Error(ErrorCode::Config, where + ": expected a list, {values}, {lo,hi,count} or {lo,step,hi}");
}

TimeWindow parse_window(const json& j) {
  TimeWindow w;
  w.lo = get<double>(j, "lo", "time window");
  w.hi = get<double>(j, "hi", "time window");
  w.include_lo = get_or<bool>(j, "include_lo", false);
  return w;
}

fields::MeshPtr parse_geometry(const json& g, const std::filesystem::path& base) {
  fields::MeshDescription d;
  std::filesystem::path mask = get<std::string>(g, "mask", "geometry");
  if (mask.is_relative()) mask = base / mask;
  d.mask = fields::read_region_mask(mask);
  const auto cell = get<std::vector<double>>(g, "cell_size", "geometry");
  if (cell.size() != 2) throw Error(ErrorCode::Config, "geometry.cell_size needs two entries");
  d.mask_dx = cell[0];
  d.mask_dy = cell[1];
  d.refine = get<std::size_t>(g, "refine", "geometry");
  const auto origin = get_or<std::vector<double>>(g, "origin", {0.0, 0.0});
  d.x0 = origin.at(0);
  d.y0 = origin.at(1);
  if (g.contains("boundaries")) {
    const auto& b = g.at("boundaries");
    const char* names[4] = {"left", "right", "bottom", "top"};
    for (int s = 0; s < 4; ++s)
      if (b.contains(names[s])) d.sides[static_cast<std::size_t>(s)] = fields::parse_boundary_tag(b.at(names[s]).get<std::string>());
  }
  return std::make_shared<const fields::StructuredMesh>(fields::build_mesh(d));
}

neutronics::MaterialTable parse_materials(const json& m, const json& kin) {
  neutronics::MaterialTable t;
  t.energy_groups = get<std::size_t>(m, "groups", "materials");
  const std::size_t G = t.energy_groups;
  const json regions = get<json>(m, "regions", "materials");
  for (const auto& [key, r] : regions.items()) {
    const std::string where = "materials.regions." + key;
    neutronics::RegionMaterial rm;
    rm.groups.resize(G);
    auto vec = [&](const char* name, double fallback, bool required) {
      std::vector<double> v = required ? get<std::vector<double>>(r, name, where)
                                       : get_or<std::vector<double>>(r, name, std::vector<double>(G, fallback));
      if (v.size() != G) throw Error(ErrorCode::Config, where + "." + name + ": one value per group expected");
      return v;
    };
    const auto d = vec("D", 0.0, true), sa = vec("sigma_a", 0.0, true), nf = vec("nu_sigma_f", 0.0, true);
    const auto chi = vec("chi", 0.0, true), b2 = vec("buckling", 0.0, false), v = vec("velocity", 1.0, true);
    for (std::size_t g = 0; g < G; ++g) rm.groups[g] = {d[g], sa[g], nf[g], chi[g], b2[g], v[g]};
    rm.scatter = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(G));
    const auto sc = get<std::vector<std::vector<double>>>(r, "scatter", where);
    if (sc.size() != G) throw Error(ErrorCode::Config, where + ".scatter must be G x G");
    for (std::size_t g = 0; g < G; ++g) {
      if (sc[g].size() != G) throw Error(ErrorCode::Config, where + ".scatter must be G x G");
      for (std::size_t h = 0; h < G; ++h)
        rm.scatter(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h)) = sc[g][h];
    }
    t.regions[std::stoi(key)] = rm;
  }
  t.kinetics = neutronics::make_kinetics(get<std::vector<double>>(kin, "beta", "kinetics"),
                                         get<std::vector<double>>(kin, "lambda", "kinetics"));
  try {
    t.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, std::string("materials: ") + e.what());
  }
  return t;
}

thermal::ThermalProperties parse_thermal(const json& j) {
  thermal::ThermalProperties p;
  p.boundary_temperature = get_or<double>(j, "boundary_temperature", 600.0);
  const json regions = get<json>(j, "regions", "thermal");
  for (const auto& [key, r] : regions.items()) {
    const std::string where = "thermal.regions." + key;
    p.regions[std::stoi(key)] = {get<double>(r, "k", where), get<double>(r, "rho", where), get<double>(r, "cp", where)};
  }
  p.validate();
  return p;
}

}  // namespace

BenchmarkCase parse_case(const json& c, const std::filesystem::path& base) {
  BenchmarkCase bc;
  bc.config = c;
  bc.name = get<std::string>(c, "benchmark", "config");
  auto& m = bc.model;
  m.name = bc.name;
  m.mesh = parse_geometry(get<json>(c, "geometry", "config"), base);
  m.materials = parse_materials(get<json>(c, "materials", "config"), get<json>(c, "kinetics", "config"));
  m.thermal = parse_thermal(get<json>(c, "thermal", "config"));
  for (int id : m.mesh->region_ids()) {
    if (!m.materials.regions.count(id)) throw Error(ErrorCode::Config, "no material for region " + std::to_string(id));
    if (!m.thermal.regions.count(id)) throw Error(ErrorCode::Config, "no thermal data for region " + std::to_string(id));
  }
  const std::size_t G = m.materials.energy_groups;

  const json coupling = get_or<json>(c, "coupling", json::object());
  m.t_ref = get_or<double>(coupling, "t_ref", 600.0);
  const json laws = get_or<json>(coupling, "laws", json::array());
  for (const auto& l : laws) {
    multiphysics::LawAssignment a;
    a.quantity = parse_quantity(get<std::string>(l, "quantity", "coupling.laws"));
    a.group = group_index(get<int>(l, "group", "coupling.laws"), G, "coupling.laws");
    a.region = get_or<int>(l, "region", 0);
    a.kind = multiphysics::parse_coupling_kind(get<std::string>(l, "kind", "coupling.laws"));
    a.gamma = get<double>(l, "gamma", "coupling.laws");
    m.laws.push_back(a);
  }
  if (coupling.contains("fit")) {
    const auto& f = coupling.at("fit");
    m.fit_lo = get_or<double>(f, "lo", 600.0);
    m.fit_hi = get_or<double>(f, "hi", 1200.0);
    m.fit_samples = get_or<std::size_t>(f, "samples", 601);
  }

  const json schedule = get_or<json>(c, "schedule", json::array());
  for (const auto& s : schedule) {
    multiphysics::ScheduleEntry e;
    e.region = get<int>(s, "region", "schedule");
    e.group = group_index(get<int>(s, "group", "schedule"), G, "schedule");
    const auto shape = get<std::string>(s, "shape", "schedule");
    if (shape == "step") {
      e.shape = multiphysics::ScheduleShape::Step;
      e.value = get<double>(s, "value", "schedule");
    } else if (shape == "ramp_step") {
      e.shape = multiphysics::ScheduleShape::RampStep;
      e.value = get<double>(s, "value", "schedule");
      e.slope = get<double>(s, "slope", "schedule");
      e.ramp_end = get<double>(s, "ramp_end", "schedule");
    } else {
      throw Error(ErrorCode::Config, "unknown schedule shape '" + shape + "'");
    }
    m.schedule.entries.push_back(e);
  }

  std::vector<std::vector<double>> train_axes, test_axes;
  const json params = get_or<json>(c, "parameters", json::array());
  for (const auto& p : params) {
    multiphysics::ParameterBinding b;
    b.name = get<std::string>(p, "name", "parameters");
    b.lo = get<double>(p, "lo", "parameters");
    b.hi = get<double>(p, "hi", "parameters");
    const auto target = get<std::string>(p, "target", "parameters");
    if (target == "gamma") b.target = multiphysics::ParameterTarget::CouplingGamma;
    else if (target == "reference") b.target = multiphysics::ParameterTarget::ReferenceValue;
    else throw Error(ErrorCode::Config, "unknown parameter target '" + target + "'");
    b.quantity = parse_quantity(get<std::string>(p, "quantity", "parameters"));
    b.group = group_index(get<int>(p, "group", "parameters"), G, "parameters");
    b.region = get_or<int>(p, "region", 0);
    m.parameters.push_back(b);
    train_axes.push_back(parse_values(get<json>(p, "train", "parameters"), "parameters.train"));
    test_axes.push_back(parse_values(get<json>(p, "test", "parameters"), "parameters.test"));
  }
  // Full tensor products; with no parameters this is one empty vector.
  auto product = [](const std::vector<std::vector<double>>& axes) {
    std::vector<std::vector<double>> out{{}};
    for (const auto& axis : axes) {
      std::vector<std::vector<double>> next;
      for (const auto& prefix : out)
        for (double v : axis) {
          auto p = prefix;
          p.push_back(v);
          next.push_back(p);
        }
      out = std::move(next);
    }
    return out;
  };
  bc.train_mu = product(train_axes);
  bc.test_mu = product(test_axes);
  for (const auto& mu : bc.train_mu) multiphysics::check_parameters(m, mu);
  for (const auto& mu : bc.test_mu) multiphysics::check_parameters(m, mu);

  const json power = get<json>(c, "power", "config");
  m.power_scale = get<double>(power, "p0", "power");
  if (power.contains("initial_power") && power.at("initial_power").is_string()) {
    if (power.at("initial_power").get<std::string>() != "area") throw Error(ErrorCode::Config, "power.initial_power must be a number or \"area\"");
    m.initial_power = m.mesh->total_area();
  } else {
    m.initial_power = get_or<double>(power, "initial_power", 1.0);
  }

  const json keff = get_or<json>(c, "keff", json::object());
  m.keff.tol = get_or<double>(keff, "tol", 1e-10);
  m.keff.max_iter = get_or<std::size_t>(keff, "max_iter", 20000);

  const json models = get_or<json>(c, "models", json::object());
  bc.truth_mode = multiphysics::parse_mode(get_or<std::string>(models, "truth", "fom"));
  bc.training_mode = multiphysics::parse_mode(get_or<std::string>(models, "training", "afom"));
  m.afom_energy = get_or<double>(models, "afom_energy", 1.0 - 1e-8);
  m.afom_iterations = get_or<std::size_t>(models, "afom_iterations", 2);

  const json time = get<json>(c, "time", "config");
  bc.transient.dt = get<double>(time, "dt", "time");
  bc.transient.t_end = get<double>(time, "t_end", "time");
  bc.transient.sample_every = get_or<double>(time, "sample_every", bc.transient.dt);
  bc.train_window = parse_window(get<json>(time, "train", "time"));
  bc.test_window = parse_window(get<json>(time, "test", "time"));

  bc.fields = multiphysics::snapshot_field_names(m);
  const json noise = get_or<json>(c, "noise", json::object());
  for (const auto& [k, v] : noise.items()) bc.noise[k] = v.get<double>();

  const json sensors = get_or<json>(c, "sensors", json::object());
  bc.sensor_stride = get_or<std::size_t>(sensors, "stride", 5);
  bc.sensor_spread = get_or<double>(sensors, "spread", 1.0);

  const json red = get_or<json>(c, "reduction", json::object());
  bc.reduction.geim_m_max = get_or<std::size_t>(red, "geim_m_max", 15);
  bc.reduction.geim_tolerance = get_or<double>(red, "geim_tolerance", 0.0);
  bc.reduction.pbdw_n = get_or<std::size_t>(red, "pbdw_n", 5);
  bc.reduction.pbdw_m_max = get_or<std::size_t>(red, "pbdw_m_max", bc.reduction.geim_m_max);
  bc.reduction.xi_grid = red.contains("xi_grid") ? parse_values(red.at("xi_grid"), "reduction.xi_grid") : pbdw::default_xi_grid();
  bc.reduction.validation_stride = get_or<std::size_t>(red, "validation_stride", 10);
  if (bc.reduction.validation_stride == 0) throw Error(ErrorCode::Config, "reduction.validation_stride must be positive");

  const json online = get_or<json>(c, "online", json::object());
  bc.online.seed = get_or<std::uint64_t>(online, "seed", 20240101);
  bc.online.uq_draws = get_or<std::size_t>(online, "uq_draws", 100);
  bc.online.uq_level = get_or<double>(online, "uq_level", 0.95);
  bc.online.noise_draws = get_or<std::size_t>(online, "noise_draws", 50);
  bc.online.report_m = get_or<std::size_t>(online, "report_m", 0);
  return bc;
}

BenchmarkCase load_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path.string());
  json c;
  try {
    c = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, path.string() + ": " + e.what());
  }
  return parse_case(c, path.parent_path());
}

}  // namespace romassim::harness
