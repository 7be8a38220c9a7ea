#include "romassim/reduction/pod.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "romassim/error.hpp"

namespace romassim::reduction {

namespace {
constexpr double kRankTolerance = 1e-12;
}

Eigen::MatrixXd PodBasis::matrix() const {
  if (modes.empty()) return {};
  Eigen::MatrixXd m(modes[0].values().size(), static_cast<Eigen::Index>(modes.size()));
  for (std::size_t n = 0; n < modes.size(); ++n) m.col(static_cast<Eigen::Index>(n)) = modes[n].values();
  return m;
}

std::size_t numerical_rank(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0 || !(eigenvalues[0] > 0.0)) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues[i] > kRankTolerance * eigenvalues[0]) ++r;
  return r;
}

std::size_t energy_rank(const Eigen::VectorXd& eigenvalues, double energy) {
  const std::size_t rank = numerical_rank(eigenvalues);
  if (energy >= 1.0) return rank;
  const double total = eigenvalues.sum();
  double acc = 0.0;
  for (std::size_t n = 0; n < rank; ++n) {
    acc += eigenvalues[static_cast<Eigen::Index>(n)];
    if (acc >= energy * total) return n + 1;
  }
  return rank;
}

PodBasis compute_pod(const fields::MeshPtr& mesh, const Eigen::MatrixXd& snapshots, std::size_t n) {
  const auto ns = static_cast<std::size_t>(snapshots.cols());
  if (ns == 0) throw Error(ErrorCode::EmptySet, "no snapshots");
  if (n < 1 || n > ns) throw Error(ErrorCode::InvalidArgument, "POD size must lie in [1, N_s]");
  if (static_cast<std::size_t>(snapshots.rows()) != mesh->size())
    throw Error(ErrorCode::MeshMismatch, "snapshot rows do not match the mesh");
  const double area = mesh->cell_area();
  // Eigenpairs of C = area X^T X from the SVD of sqrt(area) X: lambda = s^2, eta = v.
  // Forming C squares the condition number and loses the small eigenvalues.
  const Eigen::MatrixXd w = snapshots * std::sqrt(area);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw Error(ErrorCode::RankDeficient, "snapshot SVD failed");

  PodBasis basis;
  basis.eigenvalues = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(ns));
  basis.eigenvalues.head(svd.singularValues().size()) = svd.singularValues().array().square().matrix();
  if (numerical_rank(basis.eigenvalues) < n)
    throw Error(ErrorCode::RankDeficient, "snapshot set has fewer than the requested independent modes");

  Eigen::MatrixXd modes(snapshots.rows(), static_cast<Eigen::Index>(n));
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(n); ++k) {
    // Sign: first nonzero entry of eta positive.
    double sign = 1.0;
    const auto eta = svd.matrixV().col(k);
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      if (eta[i] != 0.0) {
        sign = eta[i] < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    modes.col(k) = svd.matrixU().col(k) * (sign / std::sqrt(area));
  }
  for (Eigen::Index k = 0; k < modes.cols(); ++k) basis.modes.emplace_back(mesh, Eigen::VectorXd(modes.col(k)));
  return basis;
}

PodBasis compute_pod(const SnapshotSet& snapshots, const std::string& field, std::size_t n) {
  return compute_pod(snapshots.mesh_ptr(), snapshots.matrix(field), n);
}

Eigen::VectorXd pod_project(const PodBasis& basis, const fields::ScalarField& u) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t n = 0; n < basis.size(); ++n) a[static_cast<Eigen::Index>(n)] = fields::inner_product(u, basis.modes[n]);
  return a;
}

fields::ScalarField pod_reconstruct(const PodBasis& basis, const Eigen::VectorXd& alpha) {
  if (basis.size() == 0) throw Error(ErrorCode::EmptySet, "empty basis");
  if (static_cast<std::size_t>(alpha.size()) > basis.size()) throw Error(ErrorCode::SizeMismatch, "too many coefficients");
  fields::ScalarField out(basis.mesh_ptr());
  for (Eigen::Index n = 0; n < alpha.size(); ++n) out.axpy(alpha[n], basis.modes[static_cast<std::size_t>(n)]);
  return out;
}

}  // namespace romassim::reduction
