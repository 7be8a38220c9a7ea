#include "romassim/pbdw/pbdw.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>
#include <limits>

#include "romassim/error.hpp"

namespace romassim::pbdw {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<fields::ScalarField>& fs, std::size_t count) {
  Eigen::MatrixXd m(fs.at(0).values().size(), static_cast<Eigen::Index>(count));
  for (std::size_t i = 0; i < count; ++i) m.col(static_cast<Eigen::Index>(i)) = fs[i].values();
  return m;
}

/// Columns of x times the inverse Cholesky factor of their L2 Gram matrix.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& x, double area) {
  const Eigen::MatrixXd gram = x.transpose() * x * area;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::RankDeficient, "basis is numerically dependent");
  const Eigen::MatrixXd l = llt.matrixL();
  // Gram = L L^T, so x L^-T is orthonormal.
  Eigen::MatrixXd out = l.triangularView<Eigen::Lower>().solve(x.transpose()).transpose();
  // A drop in the diagonal of L flags rank loss that LLT let through.
  const double dmax = l.diagonal().maxCoeff();
  if (l.diagonal().minCoeff() < 1e-7 * dmax) throw Error(ErrorCode::RankDeficient, "basis is numerically dependent");
  return out;
}

struct InfSup {
  double beta = 0.0;
  Eigen::VectorXd w_inf;  // field values, unit norm
};

/// Principal-angle computation on orthonormal bases.
InfSup least_stable(const Eigen::MatrixXd& zo, const Eigen::MatrixXd& uo, double area) {
  const Eigen::MatrixXd cross = zo.transpose() * uo * area;  // n x m
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(cross, Eigen::ComputeFullU);
  const Eigen::Index n = cross.rows();
  InfSup r;
  if (cross.cols() < n) {
    // Some direction of Z is orthogonal to all of U.
    r.beta = 0.0;
    Eigen::MatrixXd u = svd.matrixU();
    r.w_inf = zo * u.col(n - 1);
    return r;
  }
  r.beta = std::clamp(svd.singularValues()[n - 1], 0.0, 1.0 + 1e-12);
  r.w_inf = zo * svd.matrixU().col(n - 1);
  return r;
}

void fill_gram(PbdwModel& model) {
  const double area = model.background.at(0).mesh().cell_area();
  const Eigen::MatrixXd g = to_matrix(model.update, model.update.size());
  const Eigen::MatrixXd z = to_matrix(model.background, model.background.size());
  model.a = g.transpose() * g * area;
  model.a = 0.5 * (model.a + model.a.transpose()).eval();
  model.k = g.transpose() * z * area;
}

void fill_table(PbdwModel& model) {
  const double area = model.background.at(0).mesh().cell_area();
  const auto nn = static_cast<Eigen::Index>(model.n());
  const auto mm = static_cast<Eigen::Index>(model.m());
  model.inf_sup_table = Eigen::MatrixXd::Zero(nn, mm);
  const Eigen::MatrixXd z = to_matrix(model.background, model.n());
  const Eigen::MatrixXd g = to_matrix(model.update, model.m());
  for (Eigen::Index n = 1; n <= nn; ++n) {
    const Eigen::MatrixXd zo = orthonormalize(z.leftCols(n), area);
    for (Eigen::Index m = n; m <= mm; ++m)
      model.inf_sup_table(n - 1, m - 1) = least_stable(zo, orthonormalize(g.leftCols(m), area), area).beta;
  }
}

}  // namespace

PbdwModel assemble_pbdw(std::vector<fields::ScalarField> background, sensing::SensorLibrary sensors) {
  if (background.empty()) throw Error(ErrorCode::EmptySet, "empty background space");
  if (sensors.empty()) throw Error(ErrorCode::EmptyLibrary, "no sensors");
  PbdwModel model;
  model.background = std::move(background);
  model.sensors = std::move(sensors);
  for (std::size_t i = 0; i < model.sensors.size(); ++i) {
    model.sensor_indices.push_back(i);
    model.update.push_back(sensing::riesz_representation(model.sensors[i]));
  }
  fill_gram(model);
  return model;
}

double inf_sup(const std::vector<fields::ScalarField>& z, const std::vector<fields::ScalarField>& u) {
  if (z.empty() || u.empty()) throw Error(ErrorCode::EmptySet, "inf-sup needs two non-empty spans");
  const double area = z[0].mesh().cell_area();
  const Eigen::MatrixXd zo = orthonormalize(to_matrix(z, z.size()), area);
  const Eigen::MatrixXd uo = orthonormalize(to_matrix(u, u.size()), area);
  return least_stable(zo, uo, area).beta;
}

PbdwModel sgreedy(const std::vector<fields::ScalarField>& background, const sensing::SensorLibrary& library,
                  std::size_t m_max) {
  if (background.empty()) throw Error(ErrorCode::EmptySet, "empty background space");
  if (m_max < 1) throw Error(ErrorCode::InvalidArgument, "at least one sensor is required");
  if (library.size() < m_max) throw Error(ErrorCode::LibraryExhausted, "library smaller than the requested sensor count");
  const double area = background[0].mesh().cell_area();
  const Eigen::MatrixXd z = to_matrix(background, background.size());
  std::vector<bool> used(library.size(), false);

  PbdwModel model;
  model.background = background;
  auto pick = [&](const Eigen::VectorXd& target, bool absolute) {
    std::size_t best = library.size();
    double best_val = -std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < library.size(); ++l) {
      if (used[l]) continue;
      double v = library[l].weight.values().dot(target) * area;
      if (absolute) v = std::abs(v);
      if (v > best_val) {
        best = l;
        best_val = v;
      }
    }
    if (best == library.size()) throw Error(ErrorCode::LibraryExhausted, "every library sensor is already in use");
    if (absolute && best_val < 1e-14) throw Error(ErrorCode::StalledSelection, "no sensor sees the least stable mode");
    used[best] = true;
    model.sensor_indices.push_back(best);
    model.sensors.push_back(library[best]);
    model.update.push_back(sensing::riesz_representation(library[best]));
  };

  pick(z.col(0), false);
  while (true) {
    const std::size_t m = model.update.size();
    const auto n = static_cast<Eigen::Index>(std::min(background.size(), m));
    const Eigen::MatrixXd g = to_matrix(model.update, m);
    const Eigen::MatrixXd uo = orthonormalize(g, area);
    const InfSup is = least_stable(orthonormalize(z.leftCols(n), area), uo, area);
    model.inf_sup_history.push_back(is.beta);
    if (m == m_max) break;
    const Eigen::VectorXd w_sup = uo * (uo.transpose() * is.w_inf * area);
    pick(is.w_inf - w_sup, true);
  }
  fill_gram(model);
  fill_table(model);
  return model;
}

Eigen::MatrixXd saddle_matrix(const PbdwModel& model, double xi, std::size_t m) {
  const auto mm = static_cast<Eigen::Index>(m);
  const auto nn = static_cast<Eigen::Index>(std::min(model.n(), m));
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(mm + nn, mm + nn);
  p.topLeftCorner(mm, mm) = model.a.topLeftCorner(mm, mm);
  p.topLeftCorner(mm, mm).diagonal().array() += xi * static_cast<double>(m);
  p.topRightCorner(mm, nn) = model.k.topLeftCorner(mm, nn);
  p.bottomLeftCorner(nn, mm) = model.k.topLeftCorner(mm, nn).transpose();
  return p;
}

PbdwEstimate pbdw_online(const PbdwModel& model, const Eigen::VectorXd& y, double xi, std::size_t m) {
  if (m == 0 || m > model.m()) throw Error(ErrorCode::SizeMismatch, "sensor count outside the model");
  if (static_cast<std::size_t>(y.size()) < m) throw Error(ErrorCode::SizeMismatch, "too few measurements");
  if (xi < 0.0) throw Error(ErrorCode::InvalidArgument, "xi must be non-negative");
  const auto mm = static_cast<Eigen::Index>(m);
  const auto nn = static_cast<Eigen::Index>(std::min(model.n(), m));

  // Schur complement on the SPD block: alpha from K^T S^-1 K alpha = K^T S^-1 y.
  Eigen::MatrixXd s = model.a.topLeftCorner(mm, mm);
  s.diagonal().array() += xi * static_cast<double>(m);
  const Eigen::MatrixXd k = model.k.topLeftCorner(mm, nn);
  const Eigen::VectorXd yy = y.head(mm);
  Eigen::LLT<Eigen::MatrixXd> ls(s);
  bool ok = ls.info() == Eigen::Success;
  PbdwEstimate e;
  if (ok) {
    const Eigen::MatrixXd sk = ls.solve(k);
    const Eigen::MatrixXd schur = k.transpose() * sk;
    Eigen::LDLT<Eigen::MatrixXd> lds(schur);
    const double dmax = lds.vectorD().cwiseAbs().maxCoeff();
    ok = lds.info() == Eigen::Success && lds.vectorD().cwiseAbs().minCoeff() > 1e-14 * dmax;
    if (ok) {
      e.alpha = lds.solve(sk.transpose() * yy);
      e.theta = ls.solve(yy - k * e.alpha);
      ok = e.alpha.allFinite() && e.theta.allFinite();
    }
  }
  if (!ok) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(saddle_matrix(model, xi, m));
    const double smin = svd.singularValues().minCoeff();
    throw Error(ErrorCode::SingularSaddle, "saddle system is singular, smallest singular value " + std::to_string(smin));
  }
  e.field = fields::ScalarField(model.background.at(0).mesh_ptr());
  for (Eigen::Index i = 0; i < nn; ++i) e.field.axpy(e.alpha[i], model.background[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i < mm; ++i) e.field.axpy(e.theta[i], model.update[static_cast<std::size_t>(i)]);
  return e;
}

double noise_trace(const PbdwModel& model, double xi, std::size_t m) {
  const Eigen::MatrixXd p = saddle_matrix(model, xi, m);
  const auto mm = static_cast<Eigen::Index>(m);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(p);
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularSaddle, "saddle system is singular");
  const Eigen::MatrixXd inv = lu.inverse();
  // P^-1 I~ P^-T keeps only the first m columns of P^-1.
  return inv.leftCols(mm).squaredNorm();
}

XiSelection tune_xi(const PbdwModel& model, const std::vector<fields::ScalarField>& truths,
                    const std::vector<Eigen::VectorXd>& measurements, const std::vector<double>& xi_grid,
                    std::size_t m) {
  if (truths.empty() || truths.size() != measurements.size())
    throw Error(ErrorCode::EmptyValidation, "validation set is empty or mismatched");
  if (xi_grid.empty()) throw Error(ErrorCode::InvalidArgument, "xi grid is empty");
  XiSelection sel;
  double best = std::numeric_limits<double>::infinity();
  for (double xi : xi_grid) {
    double sum = 0.0;
    for (std::size_t i = 0; i < truths.size(); ++i) {
      const auto est = pbdw_online(model, measurements[i], xi, m);
      sum += fields::l2_norm(truths[i] - est.field) / fields::l2_norm(truths[i]);
    }
    const double mean = sum / static_cast<double>(truths.size());
    sel.errors.push_back(mean);
    if (mean < best) {
      best = mean;
      sel.xi = xi;
    }
  }
  return sel;
}

std::vector<double> default_xi_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 12; ++i) grid.push_back(std::pow(10.0, -6.0 + 8.0 * i / 12.0));
  return grid;
}

}  // namespace romassim::pbdw
