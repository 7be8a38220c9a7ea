#include "romassim/harness/storage.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "romassim/error.hpp"

namespace romassim::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // snprintf follows the C locale, which the process never changes; guard anyway.
  for (char* p = buf; *p; ++p)
    if (*p == ',') *p = '.';
  return buf;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

json mesh_to_json(const fields::StructuredMesh& mesh) {
  json j;
  j["nx"] = mesh.nx();
  j["ny"] = mesh.ny();
  j["dx"] = mesh.dx();
  j["dy"] = mesh.dy();
  j["origin"] = {mesh.x0(), mesh.y0()};
  j["region_id"] = mesh.regions();
  const char* names[4] = {"left", "right", "bottom", "top"};
  for (int s = 0; s < 4; ++s) {
    const auto side = static_cast<fields::Side>(s);
    const std::size_t len = (s < 2) ? mesh.ny() : mesh.nx();
    std::vector<std::string> tags;
    for (std::size_t k = 0; k < len; ++k) tags.push_back(fields::to_string(mesh.boundary(side, k)));
    j["boundary"][names[s]] = tags;
  }
  return j;
}

fields::MeshPtr mesh_from_json(const json& j) {
  try {
    std::array<fields::BoundaryTag, 4> sides{};
    const char* names[4] = {"left", "right", "bottom", "top"};
    std::array<std::vector<std::string>, 4> tags;
    for (int s = 0; s < 4; ++s) {
      tags[static_cast<std::size_t>(s)] = j.at("boundary").at(names[s]).get<std::vector<std::string>>();
      sides[static_cast<std::size_t>(s)] = fields::parse_boundary_tag(tags[static_cast<std::size_t>(s)].at(0));
    }
    auto mesh = std::make_shared<fields::StructuredMesh>(
        j.at("nx").get<std::size_t>(), j.at("ny").get<std::size_t>(), j.at("dx").get<double>(),
        j.at("dy").get<double>(), j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>(),
        j.at("region_id").get<std::vector<int>>(), sides);
    for (int s = 0; s < 4; ++s)
      for (std::size_t k = 0; k < tags[static_cast<std::size_t>(s)].size(); ++k)
        mesh->set_boundary(static_cast<fields::Side>(s), k,
                           fields::parse_boundary_tag(tags[static_cast<std::size_t>(s)][k]));
    return mesh;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, std::string("bad mesh record: ") + e.what());
  }
}

void write_f64(const fs::path& path, const Eigen::VectorXd& values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(values[i]);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

Eigen::VectorXd read_f64(const fs::path& path, std::size_t expected_size) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  Eigen::VectorXd v(static_cast<Eigen::Index>(expected_size));
  unsigned char bytes[8];
  for (std::size_t i = 0; i < expected_size; ++i) {
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw Error(ErrorCode::Io, path.string() + " is truncated");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    v[static_cast<Eigen::Index>(i)] = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw Error(ErrorCode::Io, path.string() + " is longer than expected");
  return v;
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, path.string() + ": " + e.what());
  }
}

void write_snapshots(const fs::path& dir, const reduction::SnapshotSet& set, const SnapshotManifest& manifest) {
  fs::create_directories(dir);
  json m;
  m["benchmark"] = manifest.benchmark;
  m["label"] = manifest.label;
  m["seed"] = manifest.seed;
  m["mesh"] = mesh_to_json(*set.mesh_ptr());
  m["fields"] = set.field_names();
  m["parameter_names"] = set.parameter_names();
  json params = json::array();
  for (std::size_t i = 0; i < set.size(); ++i) params.push_back(set.parameters(i));
  m["parameters"] = params;
  m["count"] = set.size();
  m["format"] = "float64 little-endian, x fastest";
  write_json(dir / "manifest.json", m);
  for (std::size_t i = 0; i < set.size(); ++i)
    for (const auto& f : set.field_names())
      write_f64(dir / ("snap_" + std::to_string(i) + "_" + f + ".f64"), set.values(f, i));
}

reduction::SnapshotSet read_snapshots(const fs::path& dir, SnapshotManifest* manifest) {
  const json m = read_json(dir / "manifest.json");
  try {
    auto mesh = mesh_from_json(m.at("mesh"));
    reduction::SnapshotSet set(mesh, m.at("parameter_names").get<std::vector<std::string>>());
    const auto names = m.at("fields").get<std::vector<std::string>>();
    const auto params = m.at("parameters").get<std::vector<std::vector<double>>>();
    for (std::size_t i = 0; i < params.size(); ++i) {
      std::map<std::string, Eigen::VectorXd> values;
      for (const auto& f : names) values[f] = read_f64(dir / ("snap_" + std::to_string(i) + "_" + f + ".f64"), mesh->size());
      set.add(params[i], values);
    }
    if (manifest) {
      manifest->benchmark = m.at("benchmark").get<std::string>();
      manifest->label = m.value("label", std::string());
      manifest->seed = m.value("seed", std::uint64_t{0});
    }
    return set;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, (dir / "manifest.json").string() + ": " + e.what());
  }
}

namespace {

json sensors_to_json(const sensing::SensorLibrary& sensors) {
  json out = json::array();
  for (const auto& s : sensors) out.push_back({{"x", s.x}, {"y", s.y}, {"spread", s.spread}});
  return out;
}

sensing::SensorLibrary sensors_from_json(const json& j, const fields::MeshPtr& mesh) {
  sensing::SensorLibrary out;
  for (const auto& s : j) out.push_back(sensing::make_sensor(mesh, s.at("x").get<double>(), s.at("y").get<double>(),
                                                             s.at("spread").get<double>()));
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& a) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(a.cols()));
    for (Eigen::Index k = 0; k < a.cols(); ++k) r[static_cast<std::size_t>(k)] = a(i, k);
    rows.push_back(r);
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return a;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

void write_geim_model(const fs::path& dir, const geim::GeimModel& model, const std::string& field, double sigma) {
  if (model.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty GEIM model");
  fs::create_directories(dir);
  json m;
  m["method"] = "geim";
  m["field"] = field;
  m["sigma"] = sigma;
  m["mesh"] = mesh_to_json(model.magic_functions[0].mesh());
  m["sensors"] = sensors_to_json(model.magic_sensors);
  m["sensor_indices"] = model.sensor_indices;
  m["snapshot_indices"] = model.snapshot_indices;
  m["matrix"] = matrix_to_json(model.matrix);
  m["max_error"] = model.max_error;
  m["coeff_mean"] = to_std(model.coeff_mean);
  m["coeff_std"] = to_std(model.coeff_std);
  m["regularization"] = to_std(model.regularization);
  write_json(dir / "model.json", m);
  for (std::size_t k = 0; k < model.size(); ++k)
    write_f64(dir / ("magic_" + std::to_string(k) + ".f64"), model.magic_functions[k].values());
}

geim::GeimModel read_geim_model(const fs::path& dir, std::string* field, double* sigma) {
  const json m = read_json(dir / "model.json");
  try {
    if (m.at("method") != "geim") throw Error(ErrorCode::Io, dir.string() + " does not hold a GEIM model");
    auto mesh = mesh_from_json(m.at("mesh"));
    geim::GeimModel model;
    model.magic_sensors = sensors_from_json(m.at("sensors"), mesh);
    model.sensor_indices = m.at("sensor_indices").get<std::vector<std::size_t>>();
    model.snapshot_indices = m.at("snapshot_indices").get<std::vector<std::size_t>>();
    model.matrix = matrix_from_json(m.at("matrix"));
    model.max_error = m.at("max_error").get<std::vector<double>>();
    model.coeff_mean = to_eigen(m.at("coeff_mean").get<std::vector<double>>());
    model.coeff_std = to_eigen(m.at("coeff_std").get<std::vector<double>>());
    model.regularization = to_eigen(m.at("regularization").get<std::vector<double>>());
    for (std::size_t k = 0; k < model.magic_sensors.size(); ++k)
      model.magic_functions.emplace_back(mesh, read_f64(dir / ("magic_" + std::to_string(k) + ".f64"), mesh->size()));
    if (field) *field = m.at("field").get<std::string>();
    if (sigma) *sigma = m.at("sigma").get<double>();
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, (dir / "model.json").string() + ": " + e.what());
  }
}

void write_pbdw_model(const fs::path& dir, const pbdw::PbdwModel& model, const std::string& field, double sigma) {
  if (model.n() == 0) throw Error(ErrorCode::InvalidArgument, "empty PBDW model");
  fs::create_directories(dir);
  json m;
  m["method"] = "pbdw";
  m["field"] = field;
  m["sigma"] = sigma;
  m["mesh"] = mesh_to_json(model.background[0].mesh());
  m["background_size"] = model.n();
  m["sensors"] = sensors_to_json(model.sensors);
  m["sensor_indices"] = model.sensor_indices;
  m["inf_sup_history"] = model.inf_sup_history;
  m["inf_sup_table"] = matrix_to_json(model.inf_sup_table);
  write_json(dir / "model.json", m);
  for (std::size_t k = 0; k < model.n(); ++k)
    write_f64(dir / ("zeta_" + std::to_string(k) + ".f64"), model.background[k].values());
}

pbdw::PbdwModel read_pbdw_model(const fs::path& dir, std::string* field, double* sigma) {
  const json m = read_json(dir / "model.json");
  try {
    if (m.at("method") != "pbdw") throw Error(ErrorCode::Io, dir.string() + " does not hold a PBDW model");
    auto mesh = mesh_from_json(m.at("mesh"));
    std::vector<fields::ScalarField> z;
    for (std::size_t k = 0; k < m.at("background_size").get<std::size_t>(); ++k)
      z.emplace_back(mesh, read_f64(dir / ("zeta_" + std::to_string(k) + ".f64"), mesh->size()));
    auto model = pbdw::assemble_pbdw(std::move(z), sensors_from_json(m.at("sensors"), mesh));
    model.sensor_indices = m.at("sensor_indices").get<std::vector<std::size_t>>();
    model.inf_sup_history = m.at("inf_sup_history").get<std::vector<double>>();
    model.inf_sup_table = matrix_from_json(m.at("inf_sup_table"));
    if (field) *field = m.at("field").get<std::string>();
    if (sigma) *sigma = m.at("sigma").get<double>();
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, (dir / "model.json").string() + ": " + e.what());
  }
}

}  // namespace romassim::harness
