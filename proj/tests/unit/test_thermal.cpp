#include <cmath>

#include "romassim/neutronics/materials.hpp"
#include "romassim/thermal/heat.hpp"
#include "support.hpp"

namespace romassim {
namespace {

using namespace romassim::testing;

thermal::ThermalProperties uniform_props(double k, double rho = 1.0, double cp = 1.0, double t_bc = 600.0) {
  thermal::ThermalProperties p;
  p.regions[1] = {k, rho, cp};
  p.boundary_temperature = t_bc;
  return p;
}

neutronics::CellMaterials two_group_cells(const fields::MeshPtr& m) {
  neutronics::MaterialTable t;
  neutronics::RegionMaterial r;
  r.groups = {{1.4, 0.01, 0.007, 1.0, 0.0, 1e7}, {0.4, 0.15, 0.2, 0.0, 0.0, 1e5}};
  r.scatter = Eigen::MatrixXd::Zero(2, 2);
  t.regions[1] = r;
  t.kinetics = neutronics::make_kinetics({0.0075}, {0.08});
  return neutronics::resolve_cells(*m, t);
}

TEST(PowerDensity, Examples) {
  const auto m = make_mesh(4, 4, 2.0, 2.0);
  const auto cells = two_group_cells(m);
  const fields::ScalarField zero(m);
  EXPECT_EQ(thermal::power_density({zero, zero}, cells, 1.0).values().norm(), 0.0);

  const fields::ScalarField one(m, 1.0);
  const auto q = thermal::power_density({zero, one}, cells, 0.3);
  EXPECT_NEAR(fields::reduce_field(q, fields::Reduction::Integral), 0.3 * 0.2 / 2.43 * m->total_area(), 1e-12);
  const auto q2 = thermal::power_density({zero, one}, cells, 0.6);
  EXPECT_LT((q2.values() - 2.0 * q.values()).norm(), 1e-15);
  EXPECT_EQ(error_code_of([&] { thermal::power_density({zero, one}, cells, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(Heat, UniformEquilibrium) {
  const auto m = make_mesh(5, 4, 1.0, 1.0);
  thermal::HeatStepper s(m, uniform_props(2.0));
  const fields::ScalarField t(m, 750.0), q(m);
  const auto next = s.advance(t, q, 0.5);
  EXPECT_LT((next.values().array() - 750.0).abs().maxCoeff(), 1e-10);
}

TEST(Heat, SlabParabola) {
  const double L = 10.0, k = 0.5, q0 = 3.0;
  const std::size_t n = 400;
  const auto m = make_mesh(n, 1, L / n, 1.0, {BoundaryTag::FixedTemperature, BoundaryTag::FixedTemperature,
                                              BoundaryTag::Symmetry, BoundaryTag::Symmetry});
  thermal::HeatStepper s(m, uniform_props(k));
  const auto t = s.steady(fields::ScalarField(m, q0));
  // Cell-centered values against T_bc + q x (L - x) / 2k.
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = m->x_center(i);
    worst = std::max(worst, std::abs(t[i] - (600.0 + q0 * x * (L - x) / (2 * k))));
  }
  const double peak = q0 * L * L / (8 * k);
  EXPECT_LT(worst, 1e-3 * peak);
  EXPECT_NEAR(t.values().maxCoeff() - 600.0, peak, 1e-3 * peak);
}

TEST(Heat, FirstOrderInTime) {
  const auto m = make_mesh(12, 12, 0.5, 0.5, {BoundaryTag::Symmetry, BoundaryTag::FixedTemperature,
                                              BoundaryTag::Symmetry, BoundaryTag::FixedTemperature});
  const auto q = fields::sample_field(m, [](double x, double y) { return 40.0 * std::exp(-(x * x + y * y) / 4.0); });
  const auto t0 = fields::sample_field(m, [](double x, double) { return 600.0 + 30.0 * std::cos(x / 4.0); });
  auto run = [&](double dt) {
    thermal::HeatStepper s(m, uniform_props(1.0, 2.0, 1.5));
    auto t = t0;
    for (int k = 0, n = static_cast<int>(std::llround(1.0 / dt)); k < n; ++k) t = s.advance(t, q, dt);
    return t.values();
  };
  const double dt = 0.1;
  const Eigen::VectorXd u1 = run(dt), u2 = run(dt / 2), u8 = run(dt / 8), u16 = run(dt / 16);
  const Eigen::VectorXd ref = 2.0 * u16 - u8;
  const double ratio = (u1 - ref).norm() / (u2 - ref).norm();
  EXPECT_GE(ratio, 1.7);
  EXPECT_LE(ratio, 2.3);
}

TEST(HeatProperty, MaximumPrinciple) {
  const auto m = make_mesh(9, 7, 1.0, 1.0, {BoundaryTag::FixedTemperature, BoundaryTag::FixedTemperature,
                                            BoundaryTag::Symmetry, BoundaryTag::FixedTemperature});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    fields::ScalarField t(m), q(m);
    for (std::size_t c = 0; c < m->size(); ++c) {
      t[c] = uniform(seed, c, 600.0, 900.0);
      q[c] = uniform(seed + 1000, c, 0.0, 50.0);
    }
    const double floor = std::min(t.values().minCoeff(), 600.0);
    thermal::HeatStepper s(m, uniform_props(uniform(seed, 9999, 0.1, 5.0)));
    for (int k = 0; k < 10; ++k) {
      t = s.advance(t, q, uniform(seed, 5000 + static_cast<std::uint64_t>(k), 0.01, 2.0));
      EXPECT_GE(t.values().minCoeff(), floor - 1e-9);
    }
  }
}

TEST(HeatProperty, SteadyEnergyBalance) {
  const auto m = make_mesh(15, 11, 0.7, 0.9, {BoundaryTag::Symmetry, BoundaryTag::FixedTemperature,
                                              BoundaryTag::Symmetry, BoundaryTag::FixedTemperature});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    fields::ScalarField q(m);
    for (std::size_t c = 0; c < m->size(); ++c) q[c] = uniform(seed, c, 0.0, 10.0);
    thermal::HeatStepper s(m, uniform_props(1.3));
    const auto t = s.steady(q);
    const double src = fields::reduce_field(q, fields::Reduction::Integral);
    EXPECT_NEAR(s.boundary_heat_flow(t), src, 1e-6 * src);
  }
}

TEST(Heat, InvalidInputs) {
  const auto m = make_mesh(2, 2, 1.0, 1.0);
  EXPECT_EQ(error_code_of([&] { thermal::HeatStepper(m, uniform_props(-1.0)); }), ErrorCode::InvalidArgument);
  thermal::HeatStepper s(m, uniform_props(1.0));
  EXPECT_EQ(error_code_of([&] { s.advance(fields::ScalarField(m, 600.0), fields::ScalarField(m), 0.0); }),
            ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code_of([&] { s.steady(fields::ScalarField(m)); }), ErrorCode::SingularSystem);
}

}  // namespace
}  // namespace romassim
