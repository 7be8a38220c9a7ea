#include <cmath>
#include <fstream>
#include <set>

#include "romassim/sensing/rng.hpp"
#include "romassim/sensing/sensors.hpp"
#include "support.hpp"

using namespace romassim;
using namespace romassim::sensing;
using romassim::testing::error_code_of;
using romassim::testing::make_mesh;
using romassim::testing::random_field;
using romassim::testing::uniform;

TEST(SensorLibrary, Counts) {
  auto mesh = make_mesh(10, 10, 1.0, 1.0);
  EXPECT_EQ(build_sensor_library(mesh, 10, 1.0).size(), 1u);
  EXPECT_EQ(build_sensor_library(mesh, 5, 1.0).size(), 4u);
  EXPECT_EQ(build_sensor_library(mesh, 1, 1.0).size(), 100u);
  auto iaea = make_mesh(85, 85, 2.0, 2.0);
  EXPECT_EQ(build_sensor_library(iaea, 5, 1.0).size(), 289u);
}

TEST(SensorLibrary, CentersSitOnTheSubGrid) {
  auto mesh = make_mesh(10, 10, 1.0, 1.0);
  const auto lib = build_sensor_library(mesh, 5, 1.0);
  std::set<std::pair<double, double>> centers;
  for (const auto& s : lib) centers.insert({s.x, s.y});
  EXPECT_EQ(centers.size(), lib.size());
  // offset 2, stride 5: cells 2 and 7, centers 2.5 and 7.5
  EXPECT_TRUE(centers.count({2.5, 2.5}));
  EXPECT_TRUE(centers.count({7.5, 2.5}));
  EXPECT_TRUE(centers.count({2.5, 7.5}));
  EXPECT_TRUE(centers.count({7.5, 7.5}));
}

TEST(SensorLibrary, Errors) {
  auto mesh = make_mesh(10, 10, 1.0, 1.0);
  EXPECT_EQ(error_code_of([&] { build_sensor_library(mesh, 11, 1.0); }), ErrorCode::EmptyLibrary);
  EXPECT_EQ(error_code_of([&] { build_sensor_library(mesh, 0, 1.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code_of([&] { make_sensor(mesh, 5.0, 5.0, 0.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code_of([&] { make_sensor(mesh, 500.0, 500.0, 1.0); }), ErrorCode::InvalidArgument);
}

TEST(Sensor, WeightsAreNonNegativeWithUnitMass) {
  auto mesh = make_mesh(30, 20, 0.5, 0.5);
  for (const auto& s : build_sensor_library(mesh, 3, 0.8)) {
    EXPECT_GE(s.weight.values().minCoeff(), 0.0);
    EXPECT_NEAR(s.weight.values().sum() * mesh->cell_area(), 1.0, 1e-13);
  }
}

TEST(Sensor, ConstantFieldReadsTheConstant) {
  auto mesh = make_mesh(20, 20, 1.0, 1.0);
  const fields::ScalarField u(mesh, 3.25);
  for (const auto& s : build_sensor_library(mesh, 4, 1.5)) EXPECT_NEAR(apply_functional(s, u), 3.25, 1e-12);
}

TEST(Sensor, SecondMomentOnAFineGrid) {
  // Interior Gaussian of spread s: reading of x^2 is x0^2 + s^2.
  auto mesh = make_mesh(200, 200, 0.1, 0.1);
  const auto s = make_sensor(mesh, 10.05, 9.95, 1.0);
  const auto u = fields::sample_field(mesh, [](double x, double) { return x * x; });
  EXPECT_NEAR(apply_functional(s, u), 10.05 * 10.05 + 1.0, 1e-4);
}

TEST(Sensor, RieszRepresentation) {
  auto mesh = make_mesh(16, 12, 0.5, 0.5);
  const auto lib = build_sensor_library(mesh, 4, 1.0);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto u = random_field(mesh, 40 + k);
    const auto& s = lib[k % lib.size()];
    EXPECT_NEAR(apply_functional(s, u), fields::inner_product(riesz_representation(s), u), 1e-10);
  }
}

TEST(SensorProperty, Linearity) {
  auto mesh = make_mesh(12, 12, 1.0, 1.0);
  const auto lib = build_sensor_library(mesh, 3, 1.0);
  for (std::uint64_t k = 0; k < 10; ++k) {
    const auto u = random_field(mesh, 2 * k);
    const auto v = random_field(mesh, 2 * k + 1);
    const double a = uniform(k, 0, -3.0, 3.0), b = uniform(k, 1, -3.0, 3.0);
    fields::ScalarField w = u;
    w *= a;
    w.axpy(b, v);
    const Eigen::VectorXd lhs = apply_all(lib, w);
    const Eigen::VectorXd rhs = a * apply_all(lib, u) + b * apply_all(lib, v);
    EXPECT_LT((lhs - rhs).norm(), 1e-12 * (1.0 + rhs.norm()));
  }
}

TEST(Measurements, CleanLimit) {
  auto mesh = make_mesh(10, 10, 1.0, 1.0);
  const auto lib = build_sensor_library(mesh, 2, 1.0);
  const auto u = random_field(mesh, 5);
  EXPECT_EQ(synthesize_measurements(u, lib, 0.0, 1), apply_all(lib, u));
  EXPECT_EQ(error_code_of([&] { synthesize_measurements(u, lib, -1.0, 1); }), ErrorCode::InvalidArgument);
}

TEST(Measurements, DeterministicInSeed) {
  auto mesh = make_mesh(10, 10, 1.0, 1.0);
  const auto lib = build_sensor_library(mesh, 2, 1.0);
  const auto u = random_field(mesh, 5);
  EXPECT_EQ(synthesize_measurements(u, lib, 0.3, 77), synthesize_measurements(u, lib, 0.3, 77));
  EXPECT_NE(synthesize_measurements(u, lib, 0.3, 77), synthesize_measurements(u, lib, 0.3, 78));
}

TEST(Measurements, NoiseStatistics) {
  auto mesh = make_mesh(10, 10, 1.0, 1.0);
  const SensorLibrary lib{make_sensor(mesh, 5.0, 5.0, 1.0)};
  const fields::ScalarField u(mesh, 2.0);
  const int n = 10000;
  const double sigma = 0.5;
  double sum = 0.0, sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double e = synthesize_measurements(u, lib, sigma, derive_seed(9, static_cast<std::uint64_t>(k)))[0] - 2.0;
    sum += e;
    sq += e * e;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_LT(std::abs(mean), 4.0 * sigma / std::sqrt(n));
  EXPECT_NEAR(var, sigma * sigma, 0.05 * sigma * sigma);
}

TEST(Measurements, CsvHasOneRowPerSensor) {
  auto mesh = make_mesh(10, 10, 1.0, 1.0);
  const auto lib = build_sensor_library(mesh, 5, 1.0);
  const auto dir = romassim::testing::scratch_dir("sensing_csv");
  write_measurements_csv(dir / "y.csv", lib, Eigen::VectorXd::Ones(4));
  std::ifstream in(dir / "y.csv");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
  EXPECT_EQ(error_code_of([&] { write_measurements_csv(dir / "z.csv", lib, Eigen::VectorXd::Ones(3)); }),
            ErrorCode::SizeMismatch);
}

TEST(Rng, PureFunctionOfSeedAndCounter) {
  NormalStream a(123), b(123);
  for (int k = 0; k < 7; ++k) EXPECT_EQ(a.next(), b.next());
  EXPECT_EQ(a.position(), 7u);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const double u = to_open_unit(splitmix64(k));
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
  EXPECT_GT(to_open_unit(0), 0.0);
  EXPECT_LT(to_open_unit(~std::uint64_t{0}), 1.0);
}
