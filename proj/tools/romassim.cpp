#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "romassim/error.hpp"
#include "romassim/geim/geim.hpp"
#include "romassim/harness/benchmark.hpp"
#include "romassim/harness/charts.hpp"
#include "romassim/harness/metrics.hpp"
#include "romassim/harness/parallel.hpp"
#include "romassim/harness/pipeline.hpp"
#include "romassim/harness/storage.hpp"
#include "romassim/harness/validation.hpp"
#include "romassim/pbdw/pbdw.hpp"
#include "romassim/reduction/pod.hpp"

namespace fs = std::filesystem;
using namespace romassim;
using namespace romassim::harness;

namespace {

std::mutex log_mutex;

void log_line(const std::string& msg) {
  std::lock_guard<std::mutex> lock(log_mutex);
  std::cerr << "[romassim] " << msg << '\n';
}

std::vector<fields::ScalarField> field_list(const reduction::SnapshotSet& set, const std::string& field) {
  std::vector<fields::ScalarField> out;
  for (std::size_t i = 0; i < set.size(); ++i) out.push_back(set.field(field, i));
  return out;
}

// ---- solve ----

struct SolveArgs {
  fs::path config, out;
  std::string mode = "fom";
  std::string grid = "test";
  std::vector<double> mu;
};

int cmd_solve(const SolveArgs& a) {
  const auto bc = load_case(a.config);
  const auto mode = multiphysics::parse_mode(a.mode);
  std::vector<std::vector<double>> mus;
  if (!a.mu.empty()) mus.push_back(a.mu);
  else if (a.grid == "train") mus = bc.train_mu;
  else if (a.grid == "test") mus = bc.test_mu;
  else mus = {std::vector<double>(bc.model.parameters.size())};
  for (const auto& mu : mus) multiphysics::check_parameters(bc.model, mu);

  std::vector<reduction::SnapshotSet> runs(mus.size());
  parallel_for(mus.size(), [&](std::size_t i) {
    log_line("solve " + a.mode + " run " + std::to_string(i + 1) + "/" + std::to_string(mus.size()));
    runs[i] = multiphysics::run_transient(bc.model, mode, mus[i], bc.transient);
  });
  reduction::SnapshotSet all(bc.model.mesh, multiphysics::snapshot_parameter_names(bc.model));
  for (const auto& r : runs) all.append(r);
  if (a.grid == "train") all = filter_window(all, bc.train_window);
  if (a.grid == "test") all = filter_window(all, bc.test_window);
  write_snapshots(a.out, all, {bc.name, a.mode, 0});
  log_line("wrote " + std::to_string(all.size()) + " snapshots to " + a.out.string());
  return 0;
}

// ---- offline ----

struct OfflineArgs {
  fs::path snapshots, out, config;
  std::string method = "geim";
  std::vector<std::string> fields;
  std::size_t m = 15;
  std::size_t n = 5;
  std::size_t stride = 5;
  double spread = 1.0;
  double sigma = 0.0;
};

int cmd_offline(OfflineArgs a) {
  const auto train = read_snapshots(a.snapshots);
  std::map<std::string, double> sigma;
  if (!a.config.empty()) {
    const auto bc = load_case(a.config);
    a.m = a.method == "geim" ? bc.reduction.geim_m_max : bc.reduction.pbdw_m_max;
    a.n = bc.reduction.pbdw_n;
    a.stride = bc.sensor_stride;
    a.spread = bc.sensor_spread;
    if (a.fields.empty()) a.fields = bc.fields;
    for (const auto& f : a.fields) sigma[f] = bc.sigma(f);
  }
  if (a.fields.empty()) a.fields = train.field_names();
  const auto library = sensing::build_sensor_library(train.mesh_ptr(), a.stride, a.spread);
  for (const auto& f : a.fields) {
    const double s = sigma.count(f) ? sigma[f] : a.sigma;
    if (a.method == "geim") {
      log_line("GEIM on " + f + " with " + std::to_string(library.size()) + " candidate sensors");
      auto g = geim::geim_greedy(train, f, library, a.m, 0.0);
      geim::attach_stats(g, train, f);
      write_geim_model(a.out / f, g, f, s);
    } else if (a.method == "pbdw") {
      log_line("POD + SGreedy on " + f);
      const auto pod = reduction::compute_pod(train, f, a.n);
      write_pbdw_model(a.out / f, pbdw::sgreedy(pod.modes, library, a.m), f, s);
    } else {
      throw Error(ErrorCode::InvalidArgument, "unknown method '" + a.method + "' (geim, pbdw)");
    }
  }
  return 0;
}

// ---- online ----

struct OnlineArgs {
  fs::path model, truth, out;
  double sigma_scale = 1.0;
  std::uint64_t seed = 1;
  bool plain = false;
  std::size_t stride = 10;
};

int cmd_online(const OnlineArgs& a) {
  const auto meta = read_json(a.model / "model.json");
  const std::string method = meta.at("method").get<std::string>();
  const std::string field = meta.at("field").get<std::string>();
  const double sigma = meta.at("sigma").get<double>() * a.sigma_scale;
  const auto truth = read_snapshots(a.truth);
  const auto truths = field_list(truth, field);

  std::vector<ErrorPair> errors;
  std::vector<double> xi;
  reduction::SnapshotSet estimates(truth.mesh_ptr(), truth.parameter_names());
  std::string label = method;
  if (method == "geim") {
    const auto model = read_geim_model(a.model);
    const auto y = noisy_readings(truths, model.magic_sensors, sigma, a.seed);
    const double lambda = a.plain ? -1.0 : sigma;
    if (!a.plain) label = "trgeim";
    errors = geim_curve(model, truths, y, lambda);
    for (std::size_t i = 0; i < truths.size(); ++i) {
      const auto est = a.plain ? geim::geim_online(model, y[i], model.size())
                               : geim::trgeim_online(model, y[i], model.size(), lambda);
      estimates.add(truth.parameters(i), {{field, est.field.values()}});
    }
  } else {
    const auto model = read_pbdw_model(a.model);
    const auto y = noisy_readings(truths, model.sensors, sigma, a.seed);
    auto curve = pbdw_curve(model, truths, y, pbdw::default_xi_grid(), a.stride);
    errors = curve.errors;
    xi = curve.xi;
    for (std::size_t i = 0; i < truths.size(); ++i)
      estimates.add(truth.parameters(i), {{field, pbdw::pbdw_online(model, y[i], xi.back(), model.m()).field.values()}});
  }

  fs::create_directories(a.out);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t m = 0; m < errors.size(); ++m)
    rows.push_back({std::to_string(m + 1), format_double(errors[m].absolute), format_double(errors[m].relative),
                    xi.empty() ? "" : format_double(xi[m])});
  write_csv(a.out / "errors.csv", {"M", "absolute", "relative", "xi"}, rows);
  write_snapshots(a.out / "estimates", estimates, {"", label, a.seed});
  write_json(a.out / "summary.json", {{"method", label},
                                      {"field", field},
                                      {"sigma", sigma},
                                      {"seed", a.seed},
                                      {"truths", truths.size()}});
  log_line(label + " on " + field + ": eps(M=" + std::to_string(errors.size()) + ") = " +
           format_double(errors.back().relative));
  return 0;
}

// ---- report ----

int cmd_report(const std::vector<fs::path>& runs, const fs::path& out) {
  fs::create_directories(out);
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::vector<Series>> by_field;
  for (const auto& dir : runs) {
    const auto summary = read_json(dir / "summary.json");
    const std::string method = summary.at("method").get<std::string>();
    const std::string field = summary.at("field").get<std::string>();
    const auto table = read_csv(dir / "errors.csv");
    Series s;
    s.name = dir.filename().string() + " " + method;
    for (std::size_t r = 1; r < table.size(); ++r) {
      rows.push_back({dir.filename().string(), method, field, table[r].at(0), table[r].at(1), table[r].at(2)});
      s.x.push_back(std::stod(table[r].at(0)));
      s.y.push_back(std::stod(table[r].at(2)));
    }
    by_field[field].push_back(std::move(s));
  }
  write_csv(out / "errors.csv", {"run", "method", "field", "M", "absolute", "relative"}, rows);
  for (const auto& [field, series] : by_field)
    write_line_chart(out / ("errors_" + field + ".svg"), {"Relative error, " + field, "M", "eps"}, series, true);
  log_line("report with " + std::to_string(runs.size()) + " runs in " + out.string());
  return 0;
}

// ---- validate ----

int cmd_validate(const std::string& suite, const fs::path& work) {
  ValidationOptions opt;
  opt.suite = parse_suite(suite);
  opt.work_dir = work;
  opt.log = log_line;
  const auto results = run_acceptance(opt);
  bool ok = true;
  for (const auto& r : results) {
    std::cout << format_check(r) << '\n';
    ok = ok && r.pass;
  }
  std::cout << (ok ? "all checks passed" : "some checks failed") << std::endl;
  return ok ? 0 : 1;
}

// ---- pipeline ----

struct PipelineArgs {
  fs::path config, out;
  bool fresh = false;
  double sigma_scale = 1.0;
  bool no_uq = false;
  bool no_noise = false;
};

int cmd_pipeline(const PipelineArgs& a) {
  const auto bc = load_case(a.config);
  PipelineOptions opt;
  opt.out = a.out;
  opt.reuse = !a.fresh;
  opt.online.sigma_scale = a.sigma_scale;
  opt.online.uq = !a.no_uq;
  opt.online.noise_study = !a.no_noise;
  opt.log = log_line;
  const auto result = run_pipeline(bc, opt);
  for (const auto& f : result.report.fields) {
    const std::size_t m = result.report.m_max;
    std::printf("%-5s aFOM %.4g  TR-GEIM %.4g  PBDW %.4g  (M=%zu)\n", f.field.c_str(), f.baseline.relative,
                f.trgeim[m - 1].relative, f.pbdw[m - 1].relative, m);
  }
  for (const auto& [stage, secs] : result.stage_seconds) std::printf("%-9s %.1f s\n", stage.c_str(), secs);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-order state estimation for coupled reactor transients"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Run transients and store the snapshots");
  s->add_option("--config", solve.config, "Benchmark config")->required()->check(CLI::ExistingFile);
  s->add_option("--mode", solve.mode, "fom, afom or lcfom")->check(CLI::IsMember({"fom", "afom", "lcfom"}));
  s->add_option("--out", solve.out, "Output snapshot directory")->required();
  s->add_option("--grid", solve.grid, "Parameter grid: train, test or none")
      ->check(CLI::IsMember({"train", "test", "none"}));
  s->add_option("--mu", solve.mu, "Explicit parameter vector (overrides --grid values)");

  OfflineArgs offline;
  auto* o = app.add_subcommand("offline", "Train GEIM or PBDW models from snapshots");
  o->add_option("--snapshots", offline.snapshots, "Training snapshot directory")->required()->check(CLI::ExistingDirectory);
  o->add_option("--method", offline.method, "geim or pbdw")->check(CLI::IsMember({"geim", "pbdw"}));
  o->add_option("--out", offline.out, "Output model directory (one subdirectory per field)")->required();
  o->add_option("--config", offline.config, "Take sizes, sensors and noise levels from a benchmark config");
  o->add_option("--field", offline.fields, "Fields to train (default: all)");
  o->add_option("--m", offline.m, "Maximum number of sensors");
  o->add_option("--n", offline.n, "PBDW background size");
  o->add_option("--stride", offline.stride, "Sensor library stride in cells");
  o->add_option("--spread", offline.spread, "Sensor kernel spread");
  o->add_option("--sigma", offline.sigma, "Noise level stored with the model");

  OnlineArgs online;
  auto* on = app.add_subcommand("online", "Reconstruct truth snapshots from noisy readings");
  on->add_option("--model", online.model, "Model directory (one field)")->required()->check(CLI::ExistingDirectory);
  on->add_option("--truth", online.truth, "Truth snapshot directory")->required()->check(CLI::ExistingDirectory);
  on->add_option("--sigma-scale", online.sigma_scale, "Multiplier on the model noise level");
  on->add_option("--seed", online.seed, "Measurement seed");
  on->add_option("--out", online.out, "Output directory")->required();
  on->add_flag("--plain", online.plain, "Plain GEIM instead of TR-GEIM");
  on->add_option("--validation-stride", online.stride, "Every k-th truth tunes the PBDW xi");

  std::vector<fs::path> report_runs;
  fs::path report_out;
  auto* r = app.add_subcommand("report", "Collect online runs into tables and charts");
  r->add_option("--runs", report_runs, "Online output directories")->required()->expected(1, -1);
  r->add_option("--out", report_out, "Report directory")->required();

  std::string suite = "fast";
  fs::path work;
  auto* v = app.add_subcommand("validate", "Run the acceptance checks");
  v->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  v->add_option("--work", work, "Scratch directory for pipeline runs");

  PipelineArgs pipe;
  auto* p = app.add_subcommand("pipeline", "generate -> offline -> online -> report for one benchmark");
  p->add_option("--config", pipe.config, "Benchmark config")->required()->check(CLI::ExistingFile);
  p->add_option("--out", pipe.out, "Output directory")->required();
  p->add_flag("--fresh", pipe.fresh, "Ignore cached snapshots and models");
  p->add_option("--sigma-scale", pipe.sigma_scale, "Multiplier on every noise level");
  p->add_flag("--no-uq", pipe.no_uq, "Skip the Monte-Carlo bands");
  p->add_flag("--no-noise-study", pipe.no_noise, "Skip the GEIM noise study");

  CLI11_PARSE(app, argc, argv);
  try {
    if (s->parsed()) return cmd_solve(solve);
    if (o->parsed()) return cmd_offline(offline);
    if (on->parsed()) return cmd_online(online);
    if (r->parsed()) return cmd_report(report_runs, report_out);
    if (v->parsed()) return cmd_validate(suite, work);
    if (p->parsed()) return cmd_pipeline(pipe);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
