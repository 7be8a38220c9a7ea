#include <Eigen/Dense>
#include <cmath>

#include "romassim/geim/geim.hpp"
#include "romassim/reduction/snapshots.hpp"
#include "romassim/sensing/sensors.hpp"
#include "support.hpp"

using namespace romassim;
using namespace romassim::geim;
using romassim::testing::error_code_of;
using romassim::testing::make_mesh;
using romassim::testing::random_field;
using romassim::testing::uniform;

namespace {

// Smooth two-parameter bump family on [0, 4] x [0, 4].
reduction::SnapshotSet bump_family(const fields::MeshPtr& mesh, std::size_t count, std::uint64_t seed) {
  reduction::SnapshotSet set(mesh, {"a", "b"});
  for (std::size_t i = 0; i < count; ++i) {
    const double a = uniform(seed, 2 * i, 1.0, 3.0);
    const double b = uniform(seed, 2 * i + 1, 0.5, 2.0);
    const auto f = fields::sample_field(mesh, [&](double x, double y) {
      return std::exp(-((x - a) * (x - a) + (y - 2.0) * (y - 2.0)) / b) + 0.3 * std::sin(a * x) * y;
    });
    set.add({a, b}, {{"u", f.values()}});
  }
  return set;
}

struct Fixture {
  fields::MeshPtr mesh = make_mesh(20, 20, 0.2, 0.2);
  reduction::SnapshotSet train = bump_family(mesh, 40, 1);
  sensing::SensorLibrary library = sensing::build_sensor_library(mesh, 2, 0.2);
};

}  // namespace

TEST(GeimOffline, RankOneSetStopsAtOne) {
  auto mesh = make_mesh(10, 10, 1.0, 1.0);
  const auto f = random_field(mesh, 4).values();
  reduction::SnapshotSet set(mesh, {"t"});
  for (int i = 1; i <= 5; ++i) set.add({double(i)}, {{"u", Eigen::VectorXd(i * f)}});
  const auto model = geim_greedy(set, "u", sensing::build_sensor_library(mesh, 2, 1.0), 4, 0.0);
  EXPECT_EQ(model.size(), 1u);
  EXPECT_EQ(model.snapshot_indices[0], 4u);
}

TEST(GeimOffline, TwoDimensionalSpanStopsAtTwo) {
  auto mesh = make_mesh(10, 10, 1.0, 1.0);
  const auto f = random_field(mesh, 4).values();
  const auto g = random_field(mesh, 5).values();
  reduction::SnapshotSet set(mesh, {"t"});
  for (int i = 0; i < 6; ++i) set.add({double(i)}, {{"u", Eigen::VectorXd(std::cos(i) * f + std::sin(i) * g)}});
  const auto model = geim_greedy(set, "u", sensing::build_sensor_library(mesh, 2, 1.0), 5, 0.0);
  EXPECT_EQ(model.size(), 2u);
  EXPECT_LT(model.max_error.back(), 1e-12 * model.max_error.front());
}

TEST(GeimOffline, MatrixIsUnitLowerTriangular) {
  Fixture fx;
  const auto model = geim_greedy(fx.train, "u", fx.library, 10, 0.0);
  ASSERT_EQ(model.size(), 10u);
  for (Eigen::Index i = 0; i < 10; ++i) {
    EXPECT_NEAR(model.matrix(i, i), 1.0, 1e-12);
    for (Eigen::Index j = i + 1; j < 10; ++j) EXPECT_LT(std::abs(model.matrix(i, j)), 1e-12);
  }
}

TEST(GeimOffline, ErrorHistoryMatchesReinterpolation) {
  Fixture fx;
  const auto model = geim_greedy(fx.train, "u", fx.library, 8, 0.0);
  for (std::size_t m = 1; m <= 8; ++m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < fx.train.size(); ++i) {
      const auto u = fx.train.field("u", i);
      const auto est = geim_online(model, magic_readings(model, u, m), m);
      worst = std::max(worst, fields::l2_norm(u - est.field));
    }
    EXPECT_NEAR(model.max_error[m], worst, 1e-10 * model.max_error[0]) << m;
  }
}

TEST(GeimOffline, DistinctSensorsAndTolerance) {
  Fixture fx;
  const auto model = geim_greedy(fx.train, "u", fx.library, 12, 0.0);
  for (std::size_t i = 0; i < model.size(); ++i)
    for (std::size_t j = i + 1; j < model.size(); ++j) EXPECT_NE(model.sensor_indices[i], model.sensor_indices[j]);
  const double delta = model.max_error[5];
  const auto stopped = geim_greedy(fx.train, "u", fx.library, 12, delta);
  EXPECT_LE(stopped.size(), 5u);
  EXPECT_LE(stopped.max_error.back(), delta);
}

TEST(GeimOffline, Errors) {
  Fixture fx;
  const sensing::SensorLibrary two(fx.library.begin(), fx.library.begin() + 2);
  EXPECT_EQ(error_code_of([&] { geim_greedy(fx.train, "u", two, 3, 0.0); }), ErrorCode::LibraryExhausted);
  EXPECT_EQ(error_code_of([&] { geim_greedy(fx.train, "u", {}, 3, 0.0); }), ErrorCode::EmptyLibrary);
  EXPECT_EQ(error_code_of([&] { geim_greedy(fx.train, "u", fx.library, 0, 0.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code_of([&] { geim_greedy(fx.train, "u", fx.library, 3, -1.0); }), ErrorCode::InvalidArgument);
}

TEST(GeimOnline, SingleFunction) {
  Fixture fx;
  const auto model = geim_greedy(fx.train, "u", fx.library, 4, 0.0);
  Eigen::VectorXd y(1);
  y << 2.5;
  EXPECT_NEAR(geim_online(model, y, 1).beta[0], 2.5, 1e-14);
}

TEST(GeimOnline, InterpolatesTheReadings) {
  Fixture fx;
  const auto model = geim_greedy(fx.train, "u", fx.library, 10, 0.0);
  const auto test = bump_family(fx.mesh, 5, 99);
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto u = test.field("u", i);
    const auto y = magic_readings(model, u, 10);
    const auto est = geim_online(model, y, 10);
    EXPECT_LT((magic_readings(model, est.field, 10) - y).norm(), 1e-10 * y.norm());
    const Eigen::VectorXd dense = model.matrix.partialPivLu().solve(y);
    EXPECT_LT((est.beta - dense).norm(), 1e-10 * dense.norm());
  }
}

TEST(GeimOnline, SizeErrors) {
  Fixture fx;
  const auto model = geim_greedy(fx.train, "u", fx.library, 4, 0.0);
  EXPECT_EQ(error_code_of([&] { geim_online(model, Eigen::VectorXd::Ones(5), 5); }), ErrorCode::SizeMismatch);
  EXPECT_EQ(error_code_of([&] { geim_online(model, Eigen::VectorXd::Ones(2), 3); }), ErrorCode::SizeMismatch);
  EXPECT_EQ(error_code_of([&] { geim_online(model, Eigen::VectorXd::Ones(2), 0); }), ErrorCode::SizeMismatch);
}

TEST(TrGeim, ZeroWeightIsPlainGeim) {
  Fixture fx;
  auto model = geim_greedy(fx.train, "u", fx.library, 8, 0.0);
  attach_stats(model, fx.train, "u");
  const auto y = magic_readings(model, bump_family(fx.mesh, 1, 5).field("u", 0), 8);
  EXPECT_LT((trgeim_online(model, y, 8, 0.0).beta - geim_online(model, y, 8).beta).norm(), 1e-9);
}

TEST(TrGeim, HugeWeightReturnsTheMean) {
  Fixture fx;
  auto model = geim_greedy(fx.train, "u", fx.library, 8, 0.0);
  attach_stats(model, fx.train, "u");
  const auto y = magic_readings(model, bump_family(fx.mesh, 1, 5).field("u", 0), 8);
  const auto beta = trgeim_online(model, y, 8, 1e12).beta;
  for (Eigen::Index k = 0; k < 8; ++k) EXPECT_NEAR(beta[k], model.coeff_mean[k], 1e-6 * model.coeff_std[k]);
}

TEST(TrGeim, MatchesStackedLeastSquares) {
  Fixture fx;
  auto model = geim_greedy(fx.train, "u", fx.library, 10, 0.0);
  attach_stats(model, fx.train, "u");
  Eigen::VectorXd y = magic_readings(model, bump_family(fx.mesh, 1, 6).field("u", 0), 10);
  for (Eigen::Index k = 0; k < y.size(); ++k) y[k] += 0.01 * uniform(3, static_cast<std::uint64_t>(k), -1.0, 1.0);
  for (double lambda : {1e-3, 0.01, 0.5}) {
    // [B; sqrt(lambda) T] beta = [y; sqrt(lambda) T beta_bar]
    Eigen::MatrixXd a(20, 10);
    Eigen::VectorXd rhs(20);
    const Eigen::VectorXd t = model.regularization.head(10);
    a.topRows(10) = model.matrix;
    a.bottomRows(10) = std::sqrt(lambda) * t.asDiagonal().toDenseMatrix();
    rhs.head(10) = y;
    rhs.tail(10) = std::sqrt(lambda) * t.cwiseProduct(model.coeff_mean.head(10));
    const Eigen::VectorXd ref = a.colPivHouseholderQr().solve(rhs);
    const Eigen::VectorXd beta = trgeim_online(model, y, 10, lambda).beta;
    EXPECT_LT((beta - ref).norm(), 1e-10 * ref.norm()) << lambda;
  }
}

TEST(TrGeim, NeedsStatistics) {
  Fixture fx;
  const auto model = geim_greedy(fx.train, "u", fx.library, 3, 0.0);
  EXPECT_EQ(error_code_of([&] { trgeim_online(model, Eigen::VectorXd::Ones(3), 3, 0.1); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_code_of([&] { trgeim_online(model, Eigen::VectorXd::Ones(3), 3, -0.1); }), ErrorCode::InvalidArgument);
}

TEST(CoefficientStats, MeanAndSampleStd) {
  auto mesh = make_mesh(6, 6, 1.0, 1.0);
  reduction::SnapshotSet set(mesh, {"t"});
  set.add({0.0}, {{"u", Eigen::VectorXd::Constant(36, 1.0)}});
  set.add({1.0}, {{"u", Eigen::VectorXd::Constant(36, 3.0)}});
  const auto model = geim_greedy(set, "u", sensing::build_sensor_library(mesh, 3, 1.0), 1, 0.0);
  const auto s = coefficient_stats(model, set, "u");
  EXPECT_NEAR(s.mean[0], 2.0, 1e-14);
  EXPECT_NEAR(s.std[0], std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(s.regularization[0], 1.0 / std::sqrt(2.0), 1e-14);
}

TEST(CoefficientStats, ZeroVariance) {
  auto mesh = make_mesh(6, 6, 1.0, 1.0);
  reduction::SnapshotSet set(mesh, {"t"});
  set.add({0.0}, {{"u", Eigen::VectorXd::Constant(36, 2.0)}});
  set.add({1.0}, {{"u", Eigen::VectorXd::Constant(36, 2.0)}});
  const auto model = geim_greedy(set, "u", sensing::build_sensor_library(mesh, 3, 1.0), 1, 0.0);
  EXPECT_EQ(error_code_of([&] { coefficient_stats(model, set, "u"); }), ErrorCode::ZeroVariance);
  EXPECT_EQ(error_code_of([&] { coefficient_stats(model, set.subset({0}), "u"); }), ErrorCode::ZeroVariance);
}

TEST(GeimProperty, ReproducesTheMagicSnapshots) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto mesh = make_mesh(16, 16, 0.25, 0.25);
    const auto train = bump_family(mesh, 30, 200 + s);
    const auto model = geim_greedy(train, "u", sensing::build_sensor_library(mesh, 2, 0.25), 8, 0.0);
    for (std::size_t k = 0; k < model.size(); ++k) {
      const auto u = train.field("u", model.snapshot_indices[k]);
      const auto est = geim_online(model, magic_readings(model, u, model.size()), model.size());
      EXPECT_LT(fields::l2_norm(u - est.field), 1e-10 * fields::l2_norm(u));
    }
  }
}
