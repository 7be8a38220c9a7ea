#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "romassim/geim/geim.hpp"
#include "romassim/harness/benchmark.hpp"
#include "romassim/harness/charts.hpp"
#include "romassim/harness/metrics.hpp"
#include "romassim/harness/parallel.hpp"
#include "romassim/harness/pipeline.hpp"
#include "romassim/harness/storage.hpp"
#include "romassim/pbdw/pbdw.hpp"
#include "romassim/reduction/pod.hpp"
#include "support.hpp"

using namespace romassim;
using namespace romassim::harness;
using romassim::testing::config_path;
using romassim::testing::error_code_of;
using romassim::testing::make_mesh;
using romassim::testing::random_field;
using romassim::testing::scratch_dir;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t window_count(const BenchmarkCase& bc, const TimeWindow& w) {
  const auto steps = static_cast<std::size_t>(std::llround(bc.transient.t_end / bc.transient.sample_every));
  std::size_t n = 0;
  for (std::size_t k = 0; k <= steps; ++k) n += w.contains(static_cast<double>(k) * bc.transient.sample_every) ? 1 : 0;
  return n;
}

BenchmarkCase micro_case(std::size_t m) {
  auto cfg = read_json(config_path("twigl2d_a_reduced.json"));
  cfg["geometry"]["refine"] = 1;
  cfg["time"]["t_end"] = 0.4;
  cfg["time"]["train"] = {{"lo", 0.0}, {"hi", 0.2}, {"include_lo", false}};
  cfg["time"]["test"] = {{"lo", 0.2}, {"hi", 0.4}, {"include_lo", false}};
  cfg["parameters"][0]["train"] = {{"lo", 0.001}, {"hi", 0.01}, {"count", 2}};
  cfg["parameters"][0]["test"] = {0.0055};
  cfg["reduction"]["geim_m_max"] = m;
  cfg["reduction"]["pbdw_m_max"] = m;
  cfg["reduction"]["pbdw_n"] = 1;
  cfg["reduction"]["validation_stride"] = 2;
  cfg["online"]["uq_draws"] = 3;
  cfg["online"]["noise_draws"] = 2;
  return parse_case(cfg, config_path(""));
}

}  // namespace

TEST(Metrics, ComputeErrorsExample) {
  auto mesh = make_mesh(1, 1, 1.0, 1.0);
  const std::vector<fields::ScalarField> truth{fields::ScalarField(mesh, 2.0), fields::ScalarField(mesh, 1.0)};
  const std::vector<fields::ScalarField> est{fields::ScalarField(mesh, 1.5), fields::ScalarField(mesh, 0.0)};
  const auto e = compute_errors(truth, est);
  EXPECT_NEAR(e.absolute, 0.75, 1e-15);
  EXPECT_NEAR(e.relative, 0.625, 1e-15);
}

TEST(Metrics, ZeroEstimateHasUnitRelativeError) {
  auto mesh = make_mesh(5, 4, 0.5, 0.5);
  const std::vector<fields::ScalarField> truth{random_field(mesh, 1), random_field(mesh, 2)};
  const std::vector<fields::ScalarField> zero(2, fields::ScalarField(mesh, 0.0));
  EXPECT_NEAR(compute_errors(truth, zero).relative, 1.0, 1e-15);
  EXPECT_EQ(compute_errors(truth, truth).absolute, 0.0);
  EXPECT_EQ(error_code_of([&] { compute_errors(truth, {zero[0]}); }), ErrorCode::SizeMismatch);
}

TEST(Metrics, GlobalOutputs) {
  auto mesh = make_mesh(2, 2, 1.0, 1.0);
  neutronics::CellMaterials cells;
  cells.energy_groups = 1;
  cells.nu_fission = {Eigen::VectorXd::Constant(4, 2.43)};
  reduction::SnapshotSet set(mesh, {"t"});
  set.add({0.0}, {{"T", Eigen::VectorXd::Constant(4, 600.0)}, {"phi1", Eigen::VectorXd::Constant(4, 1.0)}});
  set.add({1.0}, {{"T", Eigen::VectorXd::Constant(4, 610.0)}, {"phi1", Eigen::VectorXd::Constant(4, 3.0)}});
  const auto out = global_outputs(set, cells, 2.0);
  ASSERT_EQ(out.power.size(), 2u);
  EXPECT_NEAR(out.power[0], 1.0, 1e-14);
  EXPECT_NEAR(out.power[1], 3.0, 1e-14);
  EXPECT_NEAR(out.temperature[0], 0.0, 1e-12);
  EXPECT_NEAR(out.temperature[1], 10.0, 1e-12);
  std::vector<fields::ScalarField> flux{fields::ScalarField(mesh, 1.0)};
  EXPECT_NEAR(total_power(flux, cells, 2.0), 2.0 * 4.0, 1e-13);
}

TEST(Metrics, PercentileBands) {
  const std::vector<std::vector<double>> two{{1.0, 5.0}, {3.0, 2.0}};
  const auto b = percentile_band(two, 0.95);
  EXPECT_EQ(b.lower, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(b.upper, (std::vector<double>{3.0, 5.0}));
  std::vector<std::vector<double>> same(50, {4.0, 4.0});
  const auto flat = percentile_band(same, 0.95);
  EXPECT_EQ(flat.lower, flat.upper);
  EXPECT_DOUBLE_EQ(band_coverage(b, {2.0, 6.0}), 0.5);
}

TEST(Metrics, UqBandsAreReproducible) {
  auto realize = [](std::uint64_t seed) {
    sensing::NormalStream s(seed);
    return std::vector<double>{s.next(), s.next()};
  };
  const auto a = uq_bands(realize, 40, 0.9, 3);
  const auto b = uq_bands(realize, 40, 0.9, 3);
  EXPECT_EQ(a.lower, b.lower);
  EXPECT_EQ(a.upper, b.upper);
  EXPECT_LT(a.lower[0], a.upper[0]);
}

TEST(Storage, CsvUsesRoundTripDigits) {
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_double(v)), v);
  EXPECT_EQ(format_double(0.5), "0.5");
  const auto dir = scratch_dir("csv");
  write_csv(dir / "a.csv", {"x", "y"}, {{format_double(v), "b"}});
  const auto t = read_csv(dir / "a.csv");
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[0], (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(std::stod(t[1][0]), v);
}

TEST(Storage, SnapshotRoundTripIsBitExact) {
  auto mesh = make_mesh(7, 5, 0.3, 0.7);
  reduction::SnapshotSet set(mesh, {"t", "g"});
  for (std::uint64_t k = 0; k < 3; ++k)
    set.add({0.1 * k, 1.0 / 3.0}, {{"T", random_field(mesh, k).values()}, {"phi1", random_field(mesh, 10 + k).values()}});
  const auto dir = scratch_dir("snaps");
  write_snapshots(dir, set, {"X", "train", 42});
  SnapshotManifest man;
  const auto back = read_snapshots(dir, &man);
  EXPECT_EQ(man.benchmark, "X");
  EXPECT_EQ(man.seed, 42u);
  ASSERT_EQ(back.size(), 3u);
  EXPECT_TRUE(back.mesh_ptr()->same_as(*mesh));
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_EQ(back.parameters(k), set.parameters(k));
    EXPECT_EQ(back.values("T", k), set.values("T", k));
    EXPECT_EQ(back.values("phi1", k), set.values("phi1", k));
  }
}

TEST(Storage, ModelRoundTrips) {
  auto mesh = make_mesh(12, 12, 0.5, 0.5);
  reduction::SnapshotSet set(mesh, {"t"});
  for (int k = 0; k < 12; ++k) {
    const auto f = fields::sample_field(mesh, [&](double x, double y) { return std::sin(0.3 * k * x) + y * k; });
    set.add({double(k)}, {{"u", f.values()}});
  }
  const auto lib = sensing::build_sensor_library(mesh, 2, 0.5);
  auto g = geim::geim_greedy(set, "u", lib, 5, 0.0);
  geim::attach_stats(g, set, "u");
  const auto dir = scratch_dir("models");
  write_geim_model(dir / "geim", g, "u", 0.25);
  std::string field;
  double sigma = 0.0;
  const auto g2 = read_geim_model(dir / "geim", &field, &sigma);
  EXPECT_EQ(field, "u");
  EXPECT_EQ(sigma, 0.25);
  EXPECT_EQ(g2.matrix, g.matrix);
  EXPECT_EQ(g2.coeff_mean, g.coeff_mean);
  EXPECT_EQ(g2.sensor_indices, g.sensor_indices);
  for (std::size_t m = 0; m < g.size(); ++m) EXPECT_EQ(g2.magic_functions[m].values(), g.magic_functions[m].values());

  const auto pod = reduction::compute_pod(set, "u", 3);
  const auto p = pbdw::sgreedy(pod.modes, lib, 6);
  write_pbdw_model(dir / "pbdw", p, "u", 0.5);
  const auto p2 = read_pbdw_model(dir / "pbdw");
  EXPECT_EQ(p2.sensor_indices, p.sensor_indices);
  EXPECT_EQ(p2.a, p.a);
  EXPECT_EQ(p2.k, p.k);
  EXPECT_EQ(p2.inf_sup_history, p.inf_sup_history);
}

TEST(Storage, ReadErrors) {
  const auto dir = scratch_dir("bad");
  EXPECT_EQ(error_code_of([&] { read_snapshots(dir / "missing"); }), ErrorCode::Io);
  write_f64(dir / "x.f64", Eigen::VectorXd::Ones(3));
  EXPECT_EQ(read_f64(dir / "x.f64", 3), Eigen::VectorXd::Ones(3));
  EXPECT_EQ(error_code_of([&] { read_f64(dir / "x.f64", 4); }), ErrorCode::Io);
}

TEST(Benchmarks, IaeaGrid) {
  const auto bc = load_case(config_path("iaea2d.json"));
  EXPECT_EQ(bc.model.mesh->nx(), 85u);
  EXPECT_EQ(window_count(bc, bc.train_window), 101u);
  EXPECT_EQ(window_count(bc, bc.test_window), 100u);
  EXPECT_EQ(bc.train_mu.size(), 1u);
  EXPECT_EQ(bc.reduction.geim_m_max, 15u);
  EXPECT_EQ(bc.sigma("T"), 0.5);
  EXPECT_EQ(bc.sigma("phi2"), 0.01);
  EXPECT_EQ(bc.sensor_library().size(), 289u);
}

TEST(Benchmarks, TwiglGrids) {
  const auto a = load_case(config_path("twigl2d_a.json"));
  EXPECT_EQ(a.model.mesh->nx(), 40u);
  EXPECT_EQ(a.train_mu.size(), 20u);
  EXPECT_EQ(a.test_mu.size(), 4u);
  EXPECT_EQ(window_count(a, a.train_window), 50u);
  const auto b = load_case(config_path("twigl2d_b.json"));
  EXPECT_EQ(b.train_mu.size(), 10u);
  EXPECT_EQ(window_count(b, b.train_window), 51u);
  EXPECT_EQ(b.training_mode, multiphysics::Mode::LCFOM);
  const auto r = load_case(config_path("twigl2d_a_reduced.json"));
  EXPECT_EQ(r.train_mu.size(), 10u);
  EXPECT_EQ(r.test_mu.size(), 3u);
}

TEST(Benchmarks, ConfigErrors) {
  auto cfg = read_json(config_path("iaea2d.json"));
  cfg.erase("materials");
  EXPECT_EQ(error_code_of([&] { parse_case(cfg, config_path("")); }), ErrorCode::Config);
  EXPECT_EQ(stride_range(0.0, 0.25, 1.0).size(), 5u);
  EXPECT_EQ(linspace(0.0, 1.0, 3), (std::vector<double>{0.0, 0.5, 1.0}));
}

TEST(Parallel, CoversEveryIndexAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(100, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) EXPECT_EQ(h, 1);
  std::atomic<int> calls{0};
  EXPECT_THROW(parallel_for(10,
                            [&](std::size_t i) {
                              ++calls;
                              if (i == 3 || i == 7) throw std::runtime_error("boom " + std::to_string(i));
                            }),
               std::runtime_error);
  try {
    parallel_for(10, [](std::size_t i) {
      if (i == 3 || i == 7) throw std::runtime_error(std::to_string(i));
    });
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "3");
  }
}

TEST(Charts, WriteSvg) {
  const auto dir = scratch_dir("charts");
  write_line_chart(dir / "l.svg", {"t", "x", "y"}, {{"a", {1, 2, 3}, {1e-3, 0.0, 1e-1}}}, true);
  write_bar_chart(dir / "b.svg", {"t", "x", "y"}, {"T", "phi1"}, {{"aFOM", {}, {0.1, 0.2}}}, true);
  EXPECT_NE(slurp(dir / "l.svg").find("<svg"), std::string::npos);
  EXPECT_NE(slurp(dir / "b.svg").find("aFOM"), std::string::npos);
}

TEST(Pipeline, SingleSensorRunIsDeterministicAndConsistent) {
  const auto bc = micro_case(1);
  const auto dir = scratch_dir("pipeline");
  PipelineOptions opt;
  opt.out = dir / "a";
  opt.reuse = false;
  const auto first = run_pipeline(bc, opt);
  opt.out = dir / "b";
  run_pipeline(bc, opt);

  const auto table = read_csv(dir / "a" / "report" / "relative_errors.csv");
  ASSERT_FALSE(table.empty());
  EXPECT_EQ(table[0], (std::vector<std::string>{"method", "field", "M1"}));
  for (const auto& name : {"relative_errors.csv", "absolute_errors.csv", "global_outputs.csv", "uq_bands.csv"})
    EXPECT_EQ(slurp(dir / "a" / "report" / name), slurp(dir / "b" / "report" / name)) << name;

  // The reported eps must follow from the stored residuals.
  const auto& rep = first.report;
  for (const auto& f : rep.fields) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rep.truth_set.size(); ++i)
      sum += rep.trgeim_residual.values(f.field, i).norm() / rep.truth_set.values(f.field, i).norm();
    EXPECT_NEAR(sum / rep.truth_set.size(), f.trgeim[rep.report_m - 1].relative, 1e-12) << f.field;
  }
}

TEST(Pipeline, ReusesStagesOnDisk) {
  const auto bc = micro_case(2);
  const auto dir = scratch_dir("pipeline_reuse");
  PipelineOptions opt;
  opt.out = dir;
  opt.online.uq = false;
  opt.online.noise_study = false;
  run_pipeline(bc, opt);
  const auto before = slurp(dir / "report" / "relative_errors.csv");
  std::vector<std::string> lines;
  opt.log = [&](const std::string& s) { lines.push_back(s); };
  run_pipeline(bc, opt);
  EXPECT_EQ(slurp(dir / "report" / "relative_errors.csv"), before);
  bool reused = false;
  for (const auto& l : lines) reused = reused || l.find("reus") != std::string::npos;
  EXPECT_TRUE(reused);
}
