#include "romassim/neutronics/materials.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "romassim/error.hpp"

namespace romassim::neutronics {

Kinetics make_kinetics(std::vector<double> beta, std::vector<double> lambda) {
  if (beta.size() != lambda.size())
    throw Error(ErrorCode::SizeMismatch, "beta and lambda must have one entry per precursor group");
  Kinetics k;
  k.beta_total = std::accumulate(beta.begin(), beta.end(), 0.0);
  k.beta = std::move(beta);
  k.lambda = std::move(lambda);
  return k;
}

const RegionMaterial& MaterialTable::region(int id) const {
  auto it = regions.find(id);
  if (it == regions.end()) throw Error(ErrorCode::RegionGap, "no material for region " + std::to_string(id));
  return it->second;
}

void MaterialTable::validate() const {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (energy_groups == 0) fail("at least one energy group is required");
  for (const auto& [id, m] : regions) {
    const std::string where = "region " + std::to_string(id);
    if (m.groups.size() != energy_groups) fail(where + ": wrong group count");
    if (static_cast<std::size_t>(m.scatter.rows()) != energy_groups ||
        static_cast<std::size_t>(m.scatter.cols()) != energy_groups)
      fail(where + ": scatter matrix has wrong shape");
    double chi_sum = 0.0;
    for (const auto& g : m.groups) {
      if (g.diffusion <= 0.0) fail(where + ": D must be positive");
      if (g.absorption < 0.0 || g.nu_fission < 0.0 || g.buckling < 0.0) fail(where + ": negative cross section");
      if (g.velocity <= 0.0) fail(where + ": velocity must be positive");
      if (g.chi < 0.0 || g.chi > 1.0) fail(where + ": chi outside [0,1]");
      chi_sum += g.chi;
    }
    if (std::abs(chi_sum) > 1e-12 && std::abs(chi_sum - 1.0) > 1e-12) fail(where + ": chi must sum to 0 or 1");
    if ((m.scatter.array() < 0.0).any()) fail(where + ": negative scattering");
  }
  if (kinetics.beta.size() != kinetics.lambda.size()) fail("kinetics size mismatch");
  const double sum = std::accumulate(kinetics.beta.begin(), kinetics.beta.end(), 0.0);
  if (std::abs(sum - kinetics.beta_total) > 1e-12) fail("beta_total differs from the sum of beta_j");
  for (double l : kinetics.lambda)
    if (l <= 0.0) fail("decay constants must be positive");
}

bool CellMaterials::has_upscatter() const {
  for (std::size_t g = 0; g < energy_groups; ++g)
    for (std::size_t h = 0; h < g; ++h)
      if ((scatter[g][h].array() != 0.0).any()) return true;
  return false;
}

CellMaterials resolve_cells(const fields::StructuredMesh& mesh, const MaterialTable& table) {
  table.validate();
  const auto n = static_cast<Eigen::Index>(mesh.size());
  const std::size_t G = table.energy_groups;
  CellMaterials out;
  out.energy_groups = G;
  out.kinetics = table.kinetics;
  auto alloc = [&](std::vector<Eigen::VectorXd>& v) { v.assign(G, Eigen::VectorXd::Zero(n)); };
  alloc(out.diffusion);
  alloc(out.absorption);
  alloc(out.nu_fission);
  alloc(out.chi);
  alloc(out.buckling);
  alloc(out.velocity);
  out.scatter.assign(G, std::vector<Eigen::VectorXd>(G, Eigen::VectorXd::Zero(n)));
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& m = table.region(mesh.region(static_cast<std::size_t>(c)));
    for (std::size_t g = 0; g < G; ++g) {
      const auto& gc = m.groups[g];
      out.diffusion[g][c] = gc.diffusion;
      out.absorption[g][c] = gc.absorption;
      out.nu_fission[g][c] = gc.nu_fission;
      out.chi[g][c] = gc.chi;
      out.buckling[g][c] = gc.buckling;
      out.velocity[g][c] = gc.velocity;
      for (std::size_t h = 0; h < G; ++h)
        if (h != g) out.scatter[g][h][c] = m.scatter(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(h));
    }
  }
  return out;
}

}  // namespace romassim::neutronics
