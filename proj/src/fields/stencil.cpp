#include "romassim/fields/stencil.hpp"

#include "romassim/error.hpp"

namespace romassim::fields {

Stencil diffusion_stencil(const StructuredMesh& mesh, const Eigen::VectorXd& coeff) {
  const std::size_t nx = mesh.nx(), ny = mesh.ny();
  if (static_cast<std::size_t>(coeff.size()) != mesh.size())
    throw Error(ErrorCode::SizeMismatch, "coefficient size differs from mesh");
  const double ax = 1.0 / (mesh.dx() * mesh.dx());
  const double ay = 1.0 / (mesh.dy() * mesh.dy());

  Stencil s;
  s.diagonal = Eigen::VectorXd::Zero(coeff.size());
  s.boundary = Eigen::VectorXd::Zero(coeff.size());
  s.entries.reserve(5 * mesh.size());

  auto couple = [&](std::size_t a, std::size_t b, double w) {
    const double f = w * harmonic_mean(coeff[a], coeff[b]);
    s.diagonal[a] += f;
    s.diagonal[b] += f;
    s.entries.emplace_back(a, b, -f);
    s.entries.emplace_back(b, a, -f);
  };
  auto edge = [&](std::size_t c, BoundaryTag tag, double w) {
    if (tag == BoundaryTag::Symmetry) return;
    const double f = 2.0 * w * coeff[c];
    s.diagonal[c] += f;
    s.boundary[c] += f;
  };

  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t c = mesh.index(i, j);
      if (i + 1 < nx) couple(c, c + 1, ax);
      if (j + 1 < ny) couple(c, c + nx, ay);
      if (i == 0) edge(c, mesh.boundary(Side::Left, j), ax);
      if (i + 1 == nx) edge(c, mesh.boundary(Side::Right, j), ax);
      if (j == 0) edge(c, mesh.boundary(Side::Bottom, i), ay);
      if (j + 1 == ny) edge(c, mesh.boundary(Side::Top, i), ay);
    }
  }
  return s;
}

}  // namespace romassim::fields
