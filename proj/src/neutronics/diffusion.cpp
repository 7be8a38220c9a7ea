#include "romassim/neutronics/diffusion.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <string>

#include "romassim/error.hpp"
#include "romassim/fields/stencil.hpp"

namespace romassim::neutronics {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

Eigen::VectorXd removal(const CellMaterials& cells, std::size_t g) {
  Eigen::VectorXd r = cells.absorption[g] + cells.diffusion[g].cwiseProduct(cells.buckling[g]);
  for (std::size_t h = 0; h < cells.energy_groups; ++h)
    if (h != g) r += cells.scatter[g][h];
  return r;
}

void check_cells(const fields::StructuredMesh& mesh, const CellMaterials& cells) {
  if (cells.cells() != mesh.size()) throw Error(ErrorCode::SizeMismatch, "materials do not match mesh");
}

void check_diagonal(const Eigen::VectorXd& diag) {
  for (Eigen::Index c = 0; c < diag.size(); ++c)
    if (!(diag[c] > 0.0))
      throw Error(ErrorCode::NegativeCoefficient, "non-positive operator diagonal at cell " + std::to_string(c));
}

}  // namespace

SpMat assemble_group_operator(const fields::StructuredMesh& mesh, const CellMaterials& cells, std::size_t group) {
  check_cells(mesh, cells);
  if (group >= cells.energy_groups) throw Error(ErrorCode::InvalidArgument, "group index out of range");
  auto st = fields::diffusion_stencil(mesh, cells.diffusion[group]);
  const Eigen::VectorXd diag = st.diagonal + removal(cells, group);
  check_diagonal(diag);
  for (Eigen::Index c = 0; c < diag.size(); ++c) st.entries.emplace_back(c, c, diag[c]);
  const auto n = static_cast<Eigen::Index>(mesh.size());
  SpMat op(n, n);
  op.setFromTriplets(st.entries.begin(), st.entries.end());
  return op;
}

Eigen::VectorXd fission_source(const std::vector<fields::ScalarField>& flux, const CellMaterials& cells) {
  if (flux.size() != cells.energy_groups) throw Error(ErrorCode::SizeMismatch, "flux group count");
  Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells.cells()));
  for (std::size_t g = 0; g < cells.energy_groups; ++g) s += cells.nu_fission[g].cwiseProduct(flux[g].values());
  return s;
}

double fission_power(const std::vector<fields::ScalarField>& flux, const CellMaterials& cells) {
  if (flux.empty()) return 0.0;
  return fission_source(flux, cells).sum() * flux[0].mesh().cell_area() / kNeutronsPerFission;
}

NeutronicState solve_keff(const fields::MeshPtr& mesh, const CellMaterials& cells, const KeffOptions& options) {
  check_cells(*mesh, cells);
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
  const std::size_t G = cells.energy_groups;
  bool fissile = false;
  for (std::size_t g = 0; g < G; ++g) fissile = fissile || (cells.nu_fission[g].array() > 0.0).any();
  if (!fissile) throw Error(ErrorCode::NoFission, "nuSigma_f vanishes everywhere");

  const auto n = static_cast<Eigen::Index>(mesh->size());
  std::vector<Eigen::SimplicialLDLT<SpMat>> solvers(G);
  for (std::size_t g = 0; g < G; ++g) {
    solvers[g].compute(assemble_group_operator(*mesh, cells, g));
    if (solvers[g].info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "group operator factorization failed");
  }
  const bool upscatter = cells.has_upscatter();

  std::vector<Eigen::VectorXd> phi(G, Eigen::VectorXd::Ones(n));
  auto source = [&] {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (std::size_t g = 0; g < G; ++g) s += cells.nu_fission[g].cwiseProduct(phi[g]);
    return s;
  };
  Eigen::VectorXd s = source();
  double scale = static_cast<double>(n) / s.sum();
  for (auto& p : phi) p *= scale;
  s *= scale;
  double k = 1.0;

  for (std::size_t it = 0; it < options.max_iter; ++it) {
    const std::size_t sweeps = upscatter ? 200 : 1;
    for (std::size_t sweep = 0; sweep < sweeps; ++sweep) {
      double change = 0.0;
      for (std::size_t g = 0; g < G; ++g) {
        Eigen::VectorXd rhs = cells.chi[g].cwiseProduct(s) / k;
        for (std::size_t h = 0; h < G; ++h)
          if (h != g) rhs += cells.scatter[h][g].cwiseProduct(phi[h]);
        Eigen::VectorXd next = solvers[g].solve(rhs);
        change = std::max(change, (next - phi[g]).lpNorm<Eigen::Infinity>() / std::max(next.lpNorm<Eigen::Infinity>(), 1e-300));
        phi[g] = std::move(next);
      }
      if (change < 1e-3 * options.tol) break;
    }
    Eigen::VectorXd s_new = source();
    const double k_new = k * s_new.sum() / s.sum();
    scale = static_cast<double>(n) / s_new.sum();
    for (auto& p : phi) p *= scale;
    s_new *= scale;
    const double delta = (s_new - s).lpNorm<Eigen::Infinity>() / s_new.lpNorm<Eigen::Infinity>();
    const double dk = std::abs(k_new - k);
    s = std::move(s_new);
    k = k_new;
    if (dk < options.tol && delta < options.tol) {
      NeutronicState state;
      state.k_eff = k;
      for (std::size_t g = 0; g < G; ++g) state.flux.emplace_back(mesh, phi[g]);
      const double p = fission_power(state.flux, cells);
      const double target = options.target_power / p;
      for (auto& f : state.flux) f *= target;
      const Eigen::VectorXd fs = s * target;
      const auto& kin = cells.kinetics;
      for (std::size_t j = 0; j < kin.groups(); ++j)
        state.precursors.emplace_back(mesh, Eigen::VectorXd(kin.beta[j] / (k * kin.lambda[j]) * fs));
      return state;
    }
  }
  throw Error(ErrorCode::NoConvergence, "power iteration did not converge in " + std::to_string(options.max_iter) + " iterations");
}

double steady_residual(const NeutronicState& state, const CellMaterials& cells) {
  const auto& mesh = state.flux.at(0).mesh();
  const Eigen::VectorXd s = fission_source(state.flux, cells);
  double sq = 0.0;
  for (std::size_t g = 0; g < cells.energy_groups; ++g) {
    Eigen::VectorXd r = assemble_group_operator(mesh, cells, g) * state.flux[g].values() - cells.chi[g].cwiseProduct(s) / state.k_eff;
    for (std::size_t h = 0; h < cells.energy_groups; ++h)
      if (h != g) r -= cells.scatter[h][g].cwiseProduct(state.flux[h].values());
    sq += r.squaredNorm();
  }
  return std::sqrt(sq * mesh.cell_area());
}

NeutronicsStepper::NeutronicsStepper(fields::MeshPtr mesh, std::size_t direct_limit)
    : mesh_(std::move(mesh)), direct_limit_(direct_limit) {}

NeutronicState NeutronicsStepper::advance(const NeutronicState& state, double dt, const CellMaterials& cells,
                                          double k_eff) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "time step must be positive");
  if (!(k_eff > 0.0)) throw Error(ErrorCode::InvalidArgument, "k_eff must be positive");
  check_cells(*mesh_, cells);
  const std::size_t G = cells.energy_groups;
  const auto& kin = cells.kinetics;
  const std::size_t J = kin.groups();
  if (state.flux.size() != G || state.precursors.size() != J)
    throw Error(ErrorCode::SizeMismatch, "state does not match the material groups");
  const auto n = static_cast<Eigen::Index>(mesh_->size());

  // Prompt fission plus the part of the delayed source produced within the step.
  double fission_weight = (1.0 - kin.beta_total) / k_eff;
  for (std::size_t j = 0; j < J; ++j)
    fission_weight += kin.beta[j] * kin.lambda[j] * dt / (k_eff * (1.0 + kin.lambda[j] * dt));

  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(n) * (5 + G) * G);
  Eigen::VectorXd rhs(n * static_cast<Eigen::Index>(G));
  Eigen::VectorXd guess(rhs.size());
  Eigen::VectorXd delayed = Eigen::VectorXd::Zero(n);
  for (std::size_t j = 0; j < J; ++j)
    delayed += kin.lambda[j] / (1.0 + kin.lambda[j] * dt) * state.precursors[j].values();

  for (std::size_t g = 0; g < G; ++g) {
    const Eigen::Index off = static_cast<Eigen::Index>(g) * n;
    auto st = fields::diffusion_stencil(*mesh_, cells.diffusion[g]);
    const Eigen::VectorXd inv_vdt = (cells.velocity[g] * dt).cwiseInverse();
    const Eigen::VectorXd diag = st.diagonal + removal(cells, g);
    check_diagonal(diag);
    for (const auto& t : st.entries) entries.emplace_back(t.row() + off, t.col() + off, t.value());
    for (std::size_t h = 0; h < G; ++h) {
      const Eigen::Index hoff = static_cast<Eigen::Index>(h) * n;
      for (Eigen::Index c = 0; c < n; ++c) {
        double v = -cells.chi[g][c] * fission_weight * cells.nu_fission[h][c];
        if (h == g) v += diag[c] + inv_vdt[c];
        else v -= cells.scatter[h][g][c];
        entries.emplace_back(off + c, hoff + c, v);
      }
    }
    rhs.segment(off, n) = inv_vdt.cwiseProduct(state.flux[g].values()) + cells.chi[g].cwiseProduct(delayed);
    guess.segment(off, n) = state.flux[g].values();
  }

  SpMat a(rhs.size(), rhs.size());
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();

  Eigen::VectorXd x;
  if (mesh_->size() <= direct_limit_) {
    if (!analyzed_) {
      lu_.analyzePattern(a);
      analyzed_ = true;
    }
    lu_.factorize(a);
    if (lu_.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "transient neutronics factorization failed");
    x = lu_.solve(rhs);
  } else {
    Eigen::BiCGSTAB<SpMat, Eigen::DiagonalPreconditioner<double>> solver;
    solver.setTolerance(1e-10);
    solver.setMaxIterations(10000);
    solver.compute(a);
    x = solver.solveWithGuess(rhs, guess);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "transient neutronics iteration failed");
  }
  if (!x.allFinite()) throw Error(ErrorCode::SingularSystem, "non-finite neutronics solution");

  NeutronicState out;
  out.k_eff = k_eff;
  out.time = state.time + dt;
  for (std::size_t g = 0; g < G; ++g)
    out.flux.emplace_back(mesh_, Eigen::VectorXd(x.segment(static_cast<Eigen::Index>(g) * n, n)));
  const Eigen::VectorXd s = fission_source(out.flux, cells);
  for (std::size_t j = 0; j < J; ++j) {
    Eigen::VectorXd c = (state.precursors[j].values() + dt * kin.beta[j] / k_eff * s) / (1.0 + kin.lambda[j] * dt);
    out.precursors.emplace_back(mesh_, std::move(c));
  }
  return out;
}

NeutronicState advance_neutronics(const NeutronicState& state, double dt, const CellMaterials& cells, double k_eff) {
  if (state.flux.empty()) throw Error(ErrorCode::SizeMismatch, "state has no flux");
  NeutronicsStepper stepper(state.flux[0].mesh_ptr());
  return stepper.advance(state, dt, cells, k_eff);
}

}  // namespace romassim::neutronics
