#include "romassim/geim/geim.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "romassim/error.hpp"

namespace romassim::geim {

namespace {

Eigen::MatrixXd library_matrix(const sensing::SensorLibrary& library) {
  Eigen::MatrixXd w(library.at(0).weight.values().size(), static_cast<Eigen::Index>(library.size()));
  for (std::size_t l = 0; l < library.size(); ++l) w.col(static_cast<Eigen::Index>(l)) = library[l].weight.values();
  return w;
}

Eigen::VectorXd forward_substitution(const Eigen::MatrixXd& b, const Eigen::VectorXd& y, std::size_t m) {
  const auto n = static_cast<Eigen::Index>(m);
  return b.topLeftCorner(n, n).triangularView<Eigen::Lower>().solve(y.head(n));
}

fields::ScalarField combine(const GeimModel& model, const Eigen::VectorXd& beta) {
  fields::ScalarField out(model.magic_functions.at(0).mesh_ptr());
  for (Eigen::Index k = 0; k < beta.size(); ++k) out.axpy(beta[k], model.magic_functions[static_cast<std::size_t>(k)]);
  return out;
}

void check_m(const GeimModel& model, const Eigen::VectorXd& y, std::size_t m) {
  if (m == 0 || m > model.size()) throw Error(ErrorCode::SizeMismatch, "requested more functions than the model holds");
  if (static_cast<std::size_t>(y.size()) < m) throw Error(ErrorCode::SizeMismatch, "too few measurements");
}

}  // namespace

GeimModel geim_greedy(const reduction::SnapshotSet& train, const std::string& field,
                      const sensing::SensorLibrary& library, std::size_t m_max, double delta) {
  if (library.empty()) throw Error(ErrorCode::EmptyLibrary, "sensor library is empty");
  if (m_max < 1) throw Error(ErrorCode::InvalidArgument, "M_max must be at least 1");
  if (delta < 0.0) throw Error(ErrorCode::InvalidArgument, "tolerance must be non-negative");
  if (train.empty()) throw Error(ErrorCode::EmptySet, "no training snapshots");

  const auto& mesh = train.mesh_ptr();
  const double area = mesh->cell_area();
  Eigen::MatrixXd residual = train.matrix(field);
  const Eigen::MatrixXd weights = library_matrix(library);
  // readings(l, i) = v_l(r_i)
  Eigen::MatrixXd readings = weights.transpose() * residual * area;
  const double reading_scale = readings.cwiseAbs().maxCoeff();
  std::vector<bool> used(library.size(), false);

  auto norms = [&] { return (residual.colwise().squaredNorm() * area).cwiseSqrt().eval(); };

  GeimModel model;
  Eigen::RowVectorXd err = norms();
  model.max_error.push_back(err.maxCoeff());
  std::vector<Eigen::VectorXd> q_values;
  // Weights of the chosen sensors and the running interpolation matrix.
  Eigen::MatrixXd chosen(weights.rows(), static_cast<Eigen::Index>(std::min(m_max, library.size())));
  Eigen::MatrixXd bmat(0, 0);

  // A residual at round-off level means the training span is exhausted.
  const double floor = 1e-12 * model.max_error.front();
  while (q_values.size() < m_max && model.max_error.back() > std::max(delta, floor)) {
    Eigen::Index worst = 0;
    for (Eigen::Index i = 1; i < err.size(); ++i)
      if (err[i] > err[worst]) worst = i;

    // Re-interpolate the chosen residual once: the incremental updates leave
    // round-off at the earlier sensors, which matters once residuals get small.
    Eigen::VectorXd r = residual.col(worst);
    const auto mc = static_cast<Eigen::Index>(q_values.size());
    if (mc > 0) {
      const Eigen::VectorXd y = chosen.leftCols(mc).transpose() * r * area;
      const Eigen::VectorXd c = bmat.topLeftCorner(mc, mc).triangularView<Eigen::Lower>().solve(y);
      for (Eigen::Index k = 0; k < mc; ++k) r -= c[k] * q_values[static_cast<std::size_t>(k)];
    }
    const Eigen::VectorXd r_read = weights.transpose() * r * area;

    std::size_t best = library.size();
    double best_val = 0.0;
    for (std::size_t l = 0; l < library.size(); ++l) {
      if (used[l]) continue;
      const double v = std::abs(r_read[static_cast<Eigen::Index>(l)]);
      if (best == library.size() || v > best_val) {
        best = l;
        best_val = v;
      }
    }
    if (best == library.size()) throw Error(ErrorCode::LibraryExhausted, "every library sensor is already in use");
    if (!(best_val > 1e-14 * reading_scale))
      throw Error(ErrorCode::DegenerateSnapshot, "selected residual is invisible to every remaining sensor");

    const auto b = static_cast<Eigen::Index>(best);
    const double pivot = r_read[b];
    const Eigen::VectorXd q = r / pivot;
    const Eigen::VectorXd q_read = r_read / pivot;
    const Eigen::RowVectorXd coeff = readings.row(b);
    residual.noalias() -= q * coeff;
    readings.noalias() -= q_read * coeff;
    // Exact zeros where interpolation holds by construction.
    readings.row(b).setZero();

    chosen.col(mc) = weights.col(b);
    bmat.conservativeResize(mc + 1, mc + 1);
    for (Eigen::Index k = 0; k < mc; ++k) bmat(mc, k) = chosen.col(mc).dot(q_values[static_cast<std::size_t>(k)]) * area;
    bmat.col(mc) = chosen.leftCols(mc + 1).transpose() * q * area;

    used[best] = true;
    model.sensor_indices.push_back(best);
    model.snapshot_indices.push_back(static_cast<std::size_t>(worst));
    model.magic_sensors.push_back(library[best]);
    q_values.push_back(q);
    err = norms();
    model.max_error.push_back(err.maxCoeff());
  }

  const auto m = static_cast<Eigen::Index>(q_values.size());
  model.matrix = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 0; k < m; ++k) model.magic_functions.emplace_back(mesh, q_values[static_cast<std::size_t>(k)]);
  for (Eigen::Index r = 0; r < m; ++r)
    for (Eigen::Index c = 0; c < m; ++c)
      model.matrix(r, c) = sensing::apply_functional(model.magic_sensors[static_cast<std::size_t>(r)],
                                                     model.magic_functions[static_cast<std::size_t>(c)]);
  return model;
}

Eigen::VectorXd magic_readings(const GeimModel& model, const fields::ScalarField& u, std::size_t m) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(m));
  for (std::size_t k = 0; k < m; ++k) y[static_cast<Eigen::Index>(k)] = sensing::apply_functional(model.magic_sensors.at(k), u);
  return y;
}

GeimEstimate geim_online(const GeimModel& model, const Eigen::VectorXd& y, std::size_t m) {
  check_m(model, y, m);
  GeimEstimate e;
  e.beta = forward_substitution(model.matrix, y, m);
  e.field = combine(model, e.beta);
  return e;
}

GeimEstimate trgeim_online(const GeimModel& model, const Eigen::VectorXd& y, std::size_t m, double lambda) {
  check_m(model, y, m);
  if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "regularization weight must be non-negative");
  const auto n = static_cast<Eigen::Index>(m);
  if (lambda > 0.0 && model.regularization.size() < n)
    throw Error(ErrorCode::InvalidArgument, "model has no coefficient statistics");
  const Eigen::MatrixXd b = model.matrix.topLeftCorner(n, n);
  Eigen::MatrixXd lhs = b.transpose() * b;
  Eigen::VectorXd rhs = b.transpose() * y.head(n);
  if (lambda > 0.0) {
    const Eigen::VectorXd t2 = model.regularization.head(n).array().square();
    lhs.diagonal() += lambda * t2;
    rhs += lambda * t2.cwiseProduct(model.coeff_mean.head(n));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(lhs);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "regularized normal matrix is not positive definite");
  GeimEstimate e;
  e.beta = llt.solve(rhs);
  e.field = combine(model, e.beta);
  return e;
}

Eigen::MatrixXd training_coefficients(const GeimModel& model, const reduction::SnapshotSet& train,
                                      const std::string& field) {
  const auto m = model.size();
  Eigen::MatrixXd beta(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(train.size()));
  for (std::size_t i = 0; i < train.size(); ++i)
    beta.col(static_cast<Eigen::Index>(i)) = forward_substitution(model.matrix, magic_readings(model, train.field(field, i), m), m);
  return beta;
}

CoefficientStats coefficient_stats(const GeimModel& model, const reduction::SnapshotSet& train,
                                   const std::string& field) {
  if (train.size() < 2) throw Error(ErrorCode::ZeroVariance, "statistics need at least two snapshots");
  const Eigen::MatrixXd beta = training_coefficients(model, train, field);
  CoefficientStats s;
  s.mean = beta.rowwise().mean();
  const Eigen::MatrixXd centered = beta.colwise() - s.mean;
  s.std = (centered.rowwise().squaredNorm() / static_cast<double>(train.size() - 1)).cwiseSqrt();
  for (Eigen::Index k = 0; k < s.std.size(); ++k)
    if (!(s.std[k] > 0.0)) throw Error(ErrorCode::ZeroVariance, "coefficient " + std::to_string(k) + " has zero variance");
  s.regularization = s.std.cwiseAbs().cwiseInverse();
  return s;
}

void attach_stats(GeimModel& model, const reduction::SnapshotSet& train, const std::string& field) {
  auto s = coefficient_stats(model, train, field);
  model.coeff_mean = std::move(s.mean);
  model.coeff_std = std::move(s.std);
  model.regularization = std::move(s.regularization);
}

}  // namespace romassim::geim
