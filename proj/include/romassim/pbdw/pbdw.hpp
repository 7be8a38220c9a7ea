#pragma once

#include <Eigen/Core>
#include <vector>

#include "romassim/fields/field.hpp"
#include "romassim/sensing/sensors.hpp"

namespace romassim::pbdw {

struct PbdwModel {
  std::vector<fields::ScalarField> background;  // zeta_n
  sensing::SensorLibrary sensors;
  std::vector<std::size_t> sensor_indices;      // positions in the library
  std::vector<fields::ScalarField> update;      // g_m, Riesz representers
  Eigen::MatrixXd a;                            // (g_m, g_m')
  Eigen::MatrixXd k;                            // (g_m, zeta_n)
  /// beta_{min(N,m), m} after the m-th sensor.
  std::vector<double> inf_sup_history;
  /// beta_{n,m} for every n = 1..N (rows) and m = 1..M (columns).
  Eigen::MatrixXd inf_sup_table;

  std::size_t n() const { return background.size(); }
  std::size_t m() const { return sensors.size(); }
};

/// Builds A and K for a given background basis and sensor list.
PbdwModel assemble_pbdw(std::vector<fields::ScalarField> background, sensing::SensorLibrary sensors);

/// SGreedy sensor placement for the background span.
PbdwModel sgreedy(const std::vector<fields::ScalarField>& background, const sensing::SensorLibrary& library,
                  std::size_t m_max);

/// Smallest cosine of the principal angles between span(z) and span(u).
double inf_sup(const std::vector<fields::ScalarField>& z, const std::vector<fields::ScalarField>& u);

struct PbdwEstimate {
  Eigen::VectorXd alpha;
  Eigen::VectorXd theta;
  fields::ScalarField field;
};

/// Uses the first m sensors and min(N, m) background functions.
PbdwEstimate pbdw_online(const PbdwModel& model, const Eigen::VectorXd& y, double xi, std::size_t m);
inline PbdwEstimate pbdw_online(const PbdwModel& model, const Eigen::VectorXd& y, double xi) {
  return pbdw_online(model, y, xi, model.m());
}

/// Saddle matrix ordered [theta; alpha].
Eigen::MatrixXd saddle_matrix(const PbdwModel& model, double xi, std::size_t m);
/// Tr(P^-1 I~ P^-T): noise amplification of the online solve.
double noise_trace(const PbdwModel& model, double xi, std::size_t m);

struct XiSelection {
  double xi = 0.0;
  std::vector<double> errors;  // mean relative L2 error per grid value
};

/// Grid value with the lowest mean relative error; ties go to the smaller xi.
XiSelection tune_xi(const PbdwModel& model, const std::vector<fields::ScalarField>& truths,
                    const std::vector<Eigen::VectorXd>& measurements, const std::vector<double>& xi_grid,
                    std::size_t m);

std::vector<double> default_xi_grid();

}  // namespace romassim::pbdw
