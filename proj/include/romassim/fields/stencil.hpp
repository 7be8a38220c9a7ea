#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>
#include <vector>

#include "romassim/fields/mesh.hpp"

namespace romassim::fields {

/// 5-point -div(c grad u) per unit volume with harmonic-mean face values.
/// Symmetry edges carry no flux. Every other edge is treated as a
/// Dirichlet face with coefficient 2c/h^2; its weight is returned in
/// `boundary` so callers can add a boundary value to the right-hand side.
struct Stencil {
  std::vector<Eigen::Triplet<double>> entries;
  Eigen::VectorXd diagonal;  // includes the boundary part
  Eigen::VectorXd boundary;
};

Stencil diffusion_stencil(const StructuredMesh& mesh, const Eigen::VectorXd& coeff);

inline double harmonic_mean(double a, double b) { return (a + b) > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

}  // namespace romassim::fields
