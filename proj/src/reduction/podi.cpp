#include "romassim/reduction/podi.hpp"

#include <algorithm>
#include <cmath>

#include "romassim/error.hpp"

namespace romassim::reduction {

namespace {

double axis_tolerance(const std::vector<double>& axis) {
  double scale = 0.0;
  for (double v : axis) scale = std::max(scale, std::abs(v));
  return 1e-10 * std::max(scale, 1e-300);
}

std::size_t locate(const std::vector<double>& axis, double v) {
  const double tol = axis_tolerance(axis);
  auto it = std::lower_bound(axis.begin(), axis.end(), v - tol);
  if (it == axis.end() || std::abs(*it - v) > tol) throw Error(ErrorCode::InvalidArgument, "parameter not on the grid");
  return static_cast<std::size_t>(it - axis.begin());
}

/// Builds the tensor grid and returns, for every grid point, the snapshot index.
std::vector<std::size_t> tensor_layout(const SnapshotSet& set, std::vector<std::vector<double>>& axes) {
  const std::size_t dims = set.parameter_names().size();
  if (set.empty()) throw Error(ErrorCode::EmptySet, "no snapshots");
  axes.assign(dims, {});
  for (std::size_t d = 0; d < dims; ++d) {
    std::vector<double> vals;
    for (std::size_t i = 0; i < set.size(); ++i) vals.push_back(set.parameters(i)[d]);
    std::sort(vals.begin(), vals.end());
    const double tol = 1e-10 * std::max(std::abs(vals.front()), std::abs(vals.back()));
    for (double v : vals)
      if (axes[d].empty() || v - axes[d].back() > tol) axes[d].push_back(v);
  }
  std::size_t points = 1;
  for (const auto& a : axes) points *= a.size();
  if (points != set.size()) throw Error(ErrorCode::InvalidArgument, "snapshot parameters do not form a full tensor grid");
  std::vector<std::size_t> layout(points, set.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::size_t idx = 0, stride = 1;
    for (std::size_t d = 0; d < dims; ++d) {
      idx += locate(axes[d], set.parameters(i)[d]) * stride;
      stride *= axes[d].size();
    }
    if (layout[idx] != set.size()) throw Error(ErrorCode::InvalidArgument, "duplicate parameter point");
    layout[idx] = i;
  }
  return layout;
}

PodiModel finish(const SnapshotSet& set, const std::string& field, PodBasis basis) {
  PodiModel model;
  const auto layout = tensor_layout(set, model.axes);
  const Eigen::MatrixXd snaps = set.matrix(field);
  const Eigen::MatrixXd modes = basis.matrix();
  const double area = set.mesh_ptr()->cell_area();
  model.coefficients.resize(modes.cols(), static_cast<Eigen::Index>(layout.size()));
  for (std::size_t p = 0; p < layout.size(); ++p)
    model.coefficients.col(static_cast<Eigen::Index>(p)) = modes.transpose() * snaps.col(static_cast<Eigen::Index>(layout[p])) * area;
  model.basis = std::move(basis);
  return model;
}

}  // namespace

PodiModel podi_train(const SnapshotSet& snapshots, const std::string& field, std::size_t n) {
  return finish(snapshots, field, compute_pod(snapshots, field, n));
}

PodiModel podi_train_energy(const SnapshotSet& snapshots, const std::string& field, double energy) {
  const Eigen::MatrixXd snaps = snapshots.matrix(field);
  auto full = compute_pod(snapshots.mesh_ptr(), snaps, 1);
  const std::size_t n = std::max<std::size_t>(1, energy_rank(full.eigenvalues, energy));
  return finish(snapshots, field, compute_pod(snapshots.mesh_ptr(), snaps, n));
}

PodiModel podi_train_lossless(const SnapshotSet& snapshots, const std::string& field) {
  PodiModel model;
  const auto layout = tensor_layout(snapshots, model.axes);
  const auto n = static_cast<Eigen::Index>(layout.size());
  for (std::size_t p = 0; p < layout.size(); ++p) model.basis.modes.push_back(snapshots.field(field, layout[p]));
  model.basis.eigenvalues = Eigen::VectorXd::Zero(n);
  model.coefficients = Eigen::MatrixXd::Identity(n, n);
  return model;
}

Eigen::VectorXd podi_coefficients(const PodiModel& model, const std::vector<double>& mu, bool* clamped) {
  const std::size_t dims = model.axes.size();
  if (mu.size() != dims) throw Error(ErrorCode::SizeMismatch, "parameter vector has the wrong length");
  bool outside = false;
  std::vector<std::size_t> lo(dims);
  std::vector<double> w(dims);
  for (std::size_t d = 0; d < dims; ++d) {
    const auto& a = model.axes[d];
    double x = mu[d];
    const double tol = axis_tolerance(a);
    if (x < a.front() - tol || x > a.back() + tol) outside = true;
    x = std::clamp(x, a.front(), a.back());
    if (a.size() == 1) {
      lo[d] = 0;
      w[d] = 0.0;
      continue;
    }
    auto it = std::upper_bound(a.begin(), a.end(), x);
    std::size_t k = it == a.begin() ? 0 : static_cast<std::size_t>(it - a.begin()) - 1;
    k = std::min(k, a.size() - 2);
    lo[d] = k;
    w[d] = (x - a[k]) / (a[k + 1] - a[k]);
  }
  if (clamped) *clamped = outside;

  Eigen::VectorXd out = Eigen::VectorXd::Zero(model.coefficients.rows());
  const std::size_t corners = std::size_t{1} << dims;
  for (std::size_t mask = 0; mask < corners; ++mask) {
    double weight = 1.0;
    std::size_t idx = 0, stride = 1;
    bool skip = false;
    for (std::size_t d = 0; d < dims; ++d) {
      const bool upper = (mask >> d) & 1U;
      if (model.axes[d].size() == 1 && upper) {
        skip = true;
        break;
      }
      weight *= upper ? w[d] : 1.0 - w[d];
      idx += (lo[d] + (upper ? 1 : 0)) * stride;
      stride *= model.axes[d].size();
    }
    if (skip || weight == 0.0) continue;
    out += weight * model.coefficients.col(static_cast<Eigen::Index>(idx));
  }
  return out;
}

PodiValue podi_eval(const PodiModel& model, const std::vector<double>& mu, bool strict) {
  PodiValue v;
  v.coefficients = podi_coefficients(model, mu, &v.clamped);
  if (strict && v.clamped) throw Error(ErrorCode::ExtrapolationRequest, "parameter outside the training grid");
  v.field = pod_reconstruct(model.basis, v.coefficients);
  return v;
}

}  // namespace romassim::reduction
