#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "romassim/fields/field.hpp"

namespace romassim::sensing {

/// Gaussian-kernel sensor. The weight field is normalized so that its
/// integral is 1, hence v(u) = (u, w) in L2.
struct SensorFunctional {
  double x = 0.0;
  double y = 0.0;
  double spread = 1.0;
  fields::ScalarField weight;
};

using SensorLibrary = std::vector<SensorFunctional>;

/// Kernel centered on (x, y), truncated at 6 spreads and L1-normalized.
SensorFunctional make_sensor(const fields::MeshPtr& mesh, double x, double y, double spread);

/// One sensor per cell center of the sub-grid i = offset + k*stride with
/// offset = stride/2 (integer division), same along y.
SensorLibrary build_sensor_library(const fields::MeshPtr& mesh, std::size_t stride, double spread);

double apply_functional(const SensorFunctional& v, const fields::ScalarField& u);
Eigen::VectorXd apply_all(const SensorLibrary& sensors, const fields::ScalarField& u);
fields::ScalarField riesz_representation(const SensorFunctional& v);

/// y_m = v_m(truth) + sigma * N(0,1), deterministic in seed.
Eigen::VectorXd synthesize_measurements(const fields::ScalarField& truth, const SensorLibrary& sensors, double sigma,
                                        std::uint64_t seed);

/// Rows: index, x, y, value.
void write_measurements_csv(const std::filesystem::path& path, const SensorLibrary& sensors,
                            const Eigen::VectorXd& values);

}  // namespace romassim::sensing
