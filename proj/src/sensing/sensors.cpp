#include "romassim/sensing/sensors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "romassim/error.hpp"
#include "romassim/sensing/rng.hpp"

namespace romassim::sensing {

SensorFunctional make_sensor(const fields::MeshPtr& mesh, double x, double y, double spread) {
  if (!(spread > 0.0)) throw Error(ErrorCode::InvalidArgument, "point spread must be positive");
  SensorFunctional v{x, y, spread, fields::ScalarField(mesh)};
  const double cutoff = 36.0 * spread * spread;
  double mass = 0.0;
  for (std::size_t j = 0; j < mesh->ny(); ++j) {
    const double dy = mesh->y_center(j) - y;
    for (std::size_t i = 0; i < mesh->nx(); ++i) {
      const double dx = mesh->x_center(i) - x;
      const double r2 = dx * dx + dy * dy;
      if (r2 > cutoff) continue;
      const double w = std::exp(-r2 / (2.0 * spread * spread));
      v.weight[mesh->index(i, j)] = w;
      mass += w;
    }
  }
  if (!(mass > 0.0)) throw Error(ErrorCode::InvalidArgument, "sensor kernel misses every cell");
  v.weight *= 1.0 / (mass * mesh->cell_area());
  return v;
}

SensorLibrary build_sensor_library(const fields::MeshPtr& mesh, std::size_t stride, double spread) {
  if (stride == 0) throw Error(ErrorCode::InvalidArgument, "stride must be at least 1");
  if (stride > mesh->nx() || stride > mesh->ny()) throw Error(ErrorCode::EmptyLibrary, "stride exceeds the grid");
  SensorLibrary lib;
  const std::size_t off = stride / 2;
  for (std::size_t j = off; j < mesh->ny(); j += stride)
    for (std::size_t i = off; i < mesh->nx(); i += stride)
      lib.push_back(make_sensor(mesh, mesh->x_center(i), mesh->y_center(j), spread));
  if (lib.empty()) throw Error(ErrorCode::EmptyLibrary, "no sensor fits the grid");
  return lib;
}

double apply_functional(const SensorFunctional& v, const fields::ScalarField& u) {
  return fields::inner_product(u, v.weight);
}

Eigen::VectorXd apply_all(const SensorLibrary& sensors, const fields::ScalarField& u) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(sensors.size()));
  for (std::size_t m = 0; m < sensors.size(); ++m) y[static_cast<Eigen::Index>(m)] = apply_functional(sensors[m], u);
  return y;
}

fields::ScalarField riesz_representation(const SensorFunctional& v) { return v.weight; }

Eigen::VectorXd synthesize_measurements(const fields::ScalarField& truth, const SensorLibrary& sensors, double sigma,
                                        std::uint64_t seed) {
  if (sigma < 0.0) throw Error(ErrorCode::InvalidArgument, "noise level must be non-negative");
  Eigen::VectorXd y = apply_all(sensors, truth);
  if (sigma == 0.0) return y;
  NormalStream noise(seed);
  for (Eigen::Index m = 0; m < y.size(); ++m) y[m] += sigma * noise.next();
  return y;
}

void write_measurements_csv(const std::filesystem::path& path, const SensorLibrary& sensors,
                            const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != sensors.size())
    throw Error(ErrorCode::SizeMismatch, "one value per sensor expected");
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "index,x,y,value\n";
  char buf[128];
  for (std::size_t m = 0; m < sensors.size(); ++m) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", m, sensors[m].x, sensors[m].y,
                  values[static_cast<Eigen::Index>(m)]);
    out << buf;
  }
}

}  // namespace romassim::sensing
