#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "romassim/reduction/snapshots.hpp"
#include "romassim/sensing/sensors.hpp"

namespace romassim::geim {

struct GeimModel {
  std::vector<fields::ScalarField> magic_functions;
  sensing::SensorLibrary magic_sensors;
  /// Positions of the magic sensors in the library used for training.
  std::vector<std::size_t> sensor_indices;
  /// Training snapshot picked at each step.
  std::vector<std::size_t> snapshot_indices;
  /// B(m', m) = v_m'(q_m).
  Eigen::MatrixXd matrix;
  /// Maximum training L2 error after m = 0..M functions.
  std::vector<double> max_error;

  // Training coefficient statistics (empty until coefficient_stats runs).
  Eigen::VectorXd coeff_mean;
  Eigen::VectorXd coeff_std;
  Eigen::VectorXd regularization;  // diagonal of T

  std::size_t size() const { return magic_functions.size(); }
};

GeimModel geim_greedy(const reduction::SnapshotSet& train, const std::string& field,
                      const sensing::SensorLibrary& library, std::size_t m_max, double delta);

struct GeimEstimate {
  Eigen::VectorXd beta;
  fields::ScalarField field;
};

GeimEstimate geim_online(const GeimModel& model, const Eigen::VectorXd& y, std::size_t m);
GeimEstimate trgeim_online(const GeimModel& model, const Eigen::VectorXd& y, std::size_t m, double lambda);

/// Interpolation coefficients of clean training data, one column per snapshot.
Eigen::MatrixXd training_coefficients(const GeimModel& model, const reduction::SnapshotSet& train,
                                      const std::string& field);

struct CoefficientStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd std;
  Eigen::VectorXd regularization;
};

/// Sample mean and standard deviation (n - 1) of the training coefficients.
CoefficientStats coefficient_stats(const GeimModel& model, const reduction::SnapshotSet& train,
                                   const std::string& field);
/// Computes the statistics and stores them in the model.
void attach_stats(GeimModel& model, const reduction::SnapshotSet& train, const std::string& field);

/// Readings of the first m magic sensors.
Eigen::VectorXd magic_readings(const GeimModel& model, const fields::ScalarField& u, std::size_t m);

}  // namespace romassim::geim
