#include "romassim/harness/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "romassim/error.hpp"
#include "romassim/harness/charts.hpp"
#include "romassim/harness/parallel.hpp"
#include "romassim/harness/storage.hpp"
#include "romassim/reduction/pod.hpp"
#include "romassim/sensing/rng.hpp"

namespace romassim::harness {

namespace fs = std::filesystem;

namespace {

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

std::vector<fields::ScalarField> field_list(const reduction::SnapshotSet& set, const std::string& field) {
  std::vector<fields::ScalarField> out;
  out.reserve(set.size());
  for (std::size_t i = 0; i < set.size(); ++i) out.push_back(set.field(field, i));
  return out;
}

std::vector<std::string> flux_names(std::size_t groups) {
  std::vector<std::string> out;
  for (std::size_t g = 0; g < groups; ++g) out.push_back("phi" + std::to_string(g + 1));
  return out;
}

// Stream ids below are fixed so every random draw is tied to the config seed.
constexpr std::uint64_t kUqStream = 1;
constexpr std::uint64_t kNoiseStudyStream = 2;
constexpr std::uint64_t kMeasurementStream = 100;

std::uint64_t field_stream(std::uint64_t seed, std::size_t field_index, bool pbdw) {
  return sensing::derive_seed(seed, 2 * field_index + (pbdw ? 1 : 0));
}

}  // namespace

const FieldReport& ReconstructionReport::field(const std::string& name) const {
  for (const auto& f : fields)
    if (f.field == name) return f;
  throw Error(ErrorCode::MissingField, name);
}

reduction::SnapshotSet filter_window(const reduction::SnapshotSet& set, const TimeWindow& window) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < set.size(); ++i)
    if (window.contains(set.parameters(i).at(0))) keep.push_back(i);
  return set.subset(keep);
}

SnapshotBundle generate_snapshots(const BenchmarkCase& bc, const Logger& log) {
  struct Run {
    multiphysics::Mode mode;
    std::vector<double> mu;
  };
  std::vector<Run> runs;
  auto slot = [&](multiphysics::Mode mode, const std::vector<double>& mu) {
    for (std::size_t i = 0; i < runs.size(); ++i)
      if (runs[i].mode == mode && runs[i].mu == mu) return i;
    runs.push_back({mode, mu});
    return runs.size() - 1;
  };
  std::vector<std::size_t> train_runs, truth_runs, baseline_runs;
  for (const auto& mu : bc.train_mu) train_runs.push_back(slot(bc.training_mode, mu));
  for (const auto& mu : bc.test_mu) truth_runs.push_back(slot(bc.truth_mode, mu));
  for (const auto& mu : bc.test_mu) baseline_runs.push_back(slot(bc.training_mode, mu));

  say(log, "generating " + std::to_string(runs.size()) + " transients");
  std::vector<reduction::SnapshotSet> results(runs.size());
  parallel_for(runs.size(), [&](std::size_t i) {
    results[i] = multiphysics::run_transient(bc.model, runs[i].mode, runs[i].mu, bc.transient);
  });

  const auto names = multiphysics::snapshot_parameter_names(bc.model);
  SnapshotBundle out{reduction::SnapshotSet(bc.model.mesh, names), reduction::SnapshotSet(bc.model.mesh, names),
                     reduction::SnapshotSet(bc.model.mesh, names)};
  for (auto i : train_runs) out.train.append(filter_window(results[i], bc.train_window));
  for (auto i : truth_runs) out.truth.append(filter_window(results[i], bc.test_window));
  for (auto i : baseline_runs) out.baseline.append(filter_window(results[i], bc.test_window));
  if (out.train.empty()) throw Error(ErrorCode::EmptySet, "training window holds no snapshots");
  if (out.truth.empty()) throw Error(ErrorCode::EmptySet, "test window holds no snapshots");
  return out;
}

OfflineModels build_offline(const BenchmarkCase& bc, const reduction::SnapshotSet& train, const Logger& log) {
  const auto library = bc.sensor_library();
  OfflineModels out;
  for (const auto& f : bc.fields) {
    say(log, "offline " + f + ": GEIM with " + std::to_string(library.size()) + " candidate sensors");
    auto g = geim::geim_greedy(train, f, library, bc.reduction.geim_m_max, bc.reduction.geim_tolerance);
    geim::attach_stats(g, train, f);
    out.geim.emplace(f, std::move(g));
    say(log, "offline " + f + ": POD + SGreedy");
    // Near-constant fields (T sits on a 600 K floor) can hold fewer modes than requested.
    const auto rank = reduction::numerical_rank(reduction::compute_pod(train, f, 1).eigenvalues);
    const std::size_t n = std::min(bc.reduction.pbdw_n, rank);
    if (n < bc.reduction.pbdw_n)
      say(log, "offline " + f + ": background capped at N = " + std::to_string(n) + " (numerical rank)");
    const auto pod = reduction::compute_pod(train, f, n);
    out.pbdw.emplace(f, pbdw::sgreedy(pod.modes, library, bc.reduction.pbdw_m_max));
  }
  return out;
}

std::vector<Eigen::VectorXd> noisy_readings(const std::vector<fields::ScalarField>& truths,
                                            const sensing::SensorLibrary& sensors, double sigma, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> y;
  y.reserve(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i)
    y.push_back(sensing::synthesize_measurements(truths[i], sensors, sigma, sensing::derive_seed(seed, i)));
  return y;
}

std::vector<ErrorPair> geim_curve(const geim::GeimModel& model, const std::vector<fields::ScalarField>& truths,
                                  const std::vector<Eigen::VectorXd>& y, double lambda) {
  std::vector<ErrorPair> out;
  std::vector<fields::ScalarField> est(truths.size());
  for (std::size_t m = 1; m <= model.size(); ++m) {
    for (std::size_t i = 0; i < truths.size(); ++i)
      est[i] = lambda < 0.0 ? geim::geim_online(model, y[i], m).field : geim::trgeim_online(model, y[i], m, lambda).field;
    out.push_back(compute_errors(truths, est));
  }
  return out;
}

PbdwCurve pbdw_curve(const pbdw::PbdwModel& model, const std::vector<fields::ScalarField>& truths,
                     const std::vector<Eigen::VectorXd>& y, const std::vector<double>& xi_grid,
                     std::size_t validation_stride) {
  if (validation_stride == 0) throw Error(ErrorCode::InvalidArgument, "validation stride must be positive");
  std::vector<fields::ScalarField> val_truths;
  std::vector<Eigen::VectorXd> val_y;
  for (std::size_t i = 0; i < truths.size(); i += validation_stride) {
    val_truths.push_back(truths[i]);
    val_y.push_back(y[i]);
  }
  PbdwCurve out;
  std::vector<fields::ScalarField> est(truths.size());
  for (std::size_t m = 1; m <= model.m(); ++m) {
    // beta_{n,m} = 0 (e.g. two mirror-image sensors on a symmetric core)
    // leaves the estimate undefined at this m for every xi.
    try {
      const double xi = pbdw::tune_xi(model, val_truths, val_y, xi_grid, m).xi;
      for (std::size_t i = 0; i < truths.size(); ++i) est[i] = pbdw::pbdw_online(model, y[i], xi, m).field;
      out.errors.push_back(compute_errors(truths, est));
      out.xi.push_back(xi);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularSaddle) throw;
      out.errors.push_back({std::nan(""), std::nan("")});
      out.xi.push_back(std::nan(""));
    }
  }
  return out;
}

ReconstructionReport run_online(const BenchmarkCase& bc, const SnapshotBundle& snaps, const OfflineModels& models,
                                const OnlineOptions& options, const Logger& log) {
  if (snaps.truth.size() != snaps.baseline.size())
    throw Error(ErrorCode::SizeMismatch, "truth and baseline sets differ in size");
  ReconstructionReport rep;
  rep.benchmark = bc.name;
  rep.training_label = multiphysics::to_string(bc.training_mode);
  rep.parameter_names = snaps.truth.parameter_names();
  rep.truth_set = snaps.truth;
  for (std::size_t i = 0; i < snaps.truth.size(); ++i) rep.parameters.push_back(snaps.truth.parameters(i));

  const auto& fields_in = bc.fields;
  const std::size_t nf = fields_in.size();
  const std::uint64_t seed = bc.online.seed;
  const std::uint64_t measurement_seed = sensing::derive_seed(seed, kMeasurementStream);

  std::size_t m_max = std::numeric_limits<std::size_t>::max();
  for (const auto& f : fields_in) m_max = std::min({m_max, models.geim.at(f).size(), models.pbdw.at(f).m()});
  rep.m_max = m_max;
  rep.report_m = bc.online.report_m == 0 ? m_max : std::min(bc.online.report_m, m_max);

  std::map<std::string, std::vector<fields::ScalarField>> truths;
  std::map<std::string, double> sigma;
  for (const auto& f : fields_in) {
    truths[f] = field_list(snaps.truth, f);
    sigma[f] = bc.sigma(f) * options.sigma_scale;
  }

  // Error curves.
  std::map<std::string, std::vector<Eigen::VectorXd>> y_geim, y_pbdw;
  for (std::size_t k = 0; k < nf; ++k) {
    const auto& f = fields_in[k];
    say(log, "online " + f);
    const auto& g = models.geim.at(f);
    const auto& p = models.pbdw.at(f);
    y_geim[f] = noisy_readings(truths[f], g.magic_sensors, sigma[f], field_stream(measurement_seed, k, false));
    y_pbdw[f] = noisy_readings(truths[f], p.sensors, sigma[f], field_stream(measurement_seed, k, true));

    FieldReport fr;
    fr.field = f;
    fr.sigma = sigma[f];
    fr.baseline = compute_errors(truths[f], field_list(snaps.baseline, f));
    fr.geim = geim_curve(g, truths[f], y_geim[f], -1.0);
    fr.trgeim = geim_curve(g, truths[f], y_geim[f], sigma[f]);
    auto pc = pbdw_curve(p, truths[f], y_pbdw[f], bc.reduction.xi_grid, bc.reduction.validation_stride);
    fr.pbdw = std::move(pc.errors);
    fr.xi = std::move(pc.xi);
    fr.geim.resize(m_max);
    fr.trgeim.resize(m_max);
    fr.pbdw.resize(m_max);
    fr.xi.resize(m_max);
    fr.geim_training = g.max_error;
    fr.inf_sup = p.inf_sup_history;
    rep.fields.push_back(std::move(fr));
  }

  // Estimates at the report size.
  const std::size_t mr = rep.report_m;
  rep.trgeim_estimate = reduction::SnapshotSet(snaps.truth.mesh_ptr(), rep.parameter_names);
  rep.pbdw_estimate = rep.trgeim_estimate;
  rep.trgeim_residual = rep.trgeim_estimate;
  rep.pbdw_residual = rep.trgeim_estimate;
  for (std::size_t i = 0; i < snaps.truth.size(); ++i) {
    std::map<std::string, Eigen::VectorXd> tr, pb, rtr, rpb;
    for (std::size_t k = 0; k < nf; ++k) {
      const auto& f = fields_in[k];
      tr[f] = geim::trgeim_online(models.geim.at(f), y_geim[f][i], mr, sigma[f]).field.values();
      pb[f] = pbdw::pbdw_online(models.pbdw.at(f), y_pbdw[f][i], rep.fields[k].xi[mr - 1], mr).field.values();
      rtr[f] = truths[f][i].values() - tr[f];
      rpb[f] = truths[f][i].values() - pb[f];
    }
    rep.trgeim_estimate.add(snaps.truth.parameters(i), tr);
    rep.pbdw_estimate.add(snaps.truth.parameters(i), pb);
    rep.trgeim_residual.add(snaps.truth.parameters(i), rtr);
    rep.pbdw_residual.add(snaps.truth.parameters(i), rpb);
  }

  // Global outputs relative to the initial state.
  const auto cells = neutronics::resolve_cells(*bc.model.mesh, bc.model.materials);
  const double p0 = bc.model.power_scale;
  OutputReference ref;
  ref.power = p0 * bc.model.initial_power;
  ref.temperature_l1 = bc.model.t_ref * bc.model.mesh->total_area();
  rep.truth = global_outputs(snaps.truth, cells, p0, &ref);
  rep.baseline = global_outputs(snaps.baseline, cells, p0, &ref);
  rep.trgeim = global_outputs(rep.trgeim_estimate, cells, p0, &ref);
  rep.pbdw = global_outputs(rep.pbdw_estimate, cells, p0, &ref);

  const auto fluxes = flux_names(cells.energy_groups);
  const std::size_t n = snaps.truth.size();

  if (options.uq && bc.online.uq_draws >= 2) {
    say(log, "uncertainty bands over " + std::to_string(bc.online.uq_draws) + " draws");
    auto realize = [&](std::uint64_t draw_seed) {
      std::vector<double> series(4 * n);
      std::map<std::string, std::vector<Eigen::VectorXd>> yg, yp;
      for (std::size_t k = 0; k < nf; ++k) {
        const auto& f = fields_in[k];
        yg[f] = noisy_readings(truths[f], models.geim.at(f).magic_sensors, sigma[f], field_stream(draw_seed, k, false));
        yp[f] = noisy_readings(truths[f], models.pbdw.at(f).sensors, sigma[f], field_stream(draw_seed, k, true));
      }
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<fields::ScalarField> ftr, fpb;
        for (const auto& f : fluxes) {
          const std::size_t k = static_cast<std::size_t>(std::find(fields_in.begin(), fields_in.end(), f) - fields_in.begin());
          ftr.push_back(geim::trgeim_online(models.geim.at(f), yg[f][i], mr, sigma[f]).field);
          fpb.push_back(pbdw::pbdw_online(models.pbdw.at(f), yp[f][i], rep.fields[k].xi[mr - 1], mr).field);
        }
        series[i] = total_power(ftr, cells, p0) / ref.power;
        series[n + i] = total_power(fpb, cells, p0) / ref.power;
        const std::size_t kt = static_cast<std::size_t>(std::find(fields_in.begin(), fields_in.end(), "T") - fields_in.begin());
        series[2 * n + i] =
            mean_temperature_rise(geim::trgeim_online(models.geim.at("T"), yg["T"][i], mr, sigma["T"]).field,
                                  ref.temperature_l1);
        series[3 * n + i] = mean_temperature_rise(
            pbdw::pbdw_online(models.pbdw.at("T"), yp["T"][i], rep.fields[kt].xi[mr - 1], mr).field, ref.temperature_l1);
      }
      return series;
    };
    const auto band = uq_bands(realize, bc.online.uq_draws, bc.online.uq_level, sensing::derive_seed(seed, kUqStream));
    auto slice = [&](std::size_t part) {
      PercentileBand b;
      b.lower.assign(band.lower.begin() + static_cast<long>(part * n), band.lower.begin() + static_cast<long>((part + 1) * n));
      b.upper.assign(band.upper.begin() + static_cast<long>(part * n), band.upper.begin() + static_cast<long>((part + 1) * n));
      return b;
    };
    rep.trgeim_power = slice(0);
    rep.pbdw_power = slice(1);
    rep.trgeim_temperature = slice(2);
    rep.pbdw_temperature = slice(3);
  }

  if (options.noise_study && bc.online.noise_draws > 0) {
    say(log, "noise study over " + std::to_string(bc.online.noise_draws) + " draws");
    const std::size_t draws = bc.online.noise_draws;
    // eps[d][2k] GEIM, eps[d][2k+1] TR-GEIM
    std::vector<std::vector<double>> eps(draws, std::vector<double>(2 * nf));
    const std::uint64_t study_seed = sensing::derive_seed(seed, kNoiseStudyStream);
    parallel_for(draws, [&](std::size_t d) {
      const std::uint64_t ds = sensing::derive_seed(study_seed, d);
      for (std::size_t k = 0; k < nf; ++k) {
        const auto& f = fields_in[k];
        const auto& g = models.geim.at(f);
        const auto y = noisy_readings(truths[f], g.magic_sensors, sigma[f], field_stream(ds, k, false));
        std::vector<fields::ScalarField> eg, et;
        for (std::size_t i = 0; i < n; ++i) {
          eg.push_back(geim::geim_online(g, y[i], m_max).field);
          et.push_back(geim::trgeim_online(g, y[i], m_max, sigma[f]).field);
        }
        eps[d][2 * k] = compute_errors(truths[f], eg).relative;
        eps[d][2 * k + 1] = compute_errors(truths[f], et).relative;
      }
    });
    for (std::size_t k = 0; k < nf; ++k) {
      double sg = 0.0, st = 0.0;
      for (std::size_t d = 0; d < draws; ++d) {
        sg += eps[d][2 * k];
        st += eps[d][2 * k + 1];
      }
      rep.fields[k].noise_geim = sg / static_cast<double>(draws);
      rep.fields[k].noise_trgeim = st / static_cast<double>(draws);
    }
    rep.noise_draws = draws;
  }
  return rep;
}

namespace {

std::vector<std::string> parameter_cells(const std::vector<double>& p) {
  std::vector<std::string> out;
  for (double v : p) out.push_back(format_double(v));
  return out;
}

void dump_field(const fs::path& path, const fields::ScalarField& f) {
  const auto& mesh = f.mesh();
  std::vector<std::vector<std::string>> rows;
  rows.reserve(mesh.size());
  for (std::size_t j = 0; j < mesh.ny(); ++j)
    for (std::size_t i = 0; i < mesh.nx(); ++i)
      rows.push_back({format_double(mesh.x_center(i)), format_double(mesh.y_center(j)), format_double(f[mesh.index(i, j)])});
  write_csv(path, {"x", "y", "value"}, rows);
}

}  // namespace

void write_report(const fs::path& dir, const ReconstructionReport& rep) {
  fs::create_directories(dir);
  const std::string base = rep.training_label;

  // Long-format error table.
  std::vector<std::vector<std::string>> rows;
  for (const auto& f : rep.fields) {
    for (std::size_t m = 1; m <= rep.m_max; ++m) {
      auto row = [&](const std::string& method, const ErrorPair& e) {
        rows.push_back({method, f.field, std::to_string(m), format_double(e.absolute), format_double(e.relative)});
      };
      row(base, f.baseline);
      row("geim", f.geim[m - 1]);
      row("trgeim", f.trgeim[m - 1]);
      row("pbdw", f.pbdw[m - 1]);
    }
  }
  write_csv(dir / "errors.csv", {"method", "field", "M", "E", "eps"}, rows);

  // Wide tables, one column per sensor count.
  std::vector<std::string> header{"method", "field"};
  for (std::size_t m = 1; m <= rep.m_max; ++m) header.push_back("M" + std::to_string(m));
  for (int rel = 0; rel < 2; ++rel) {
    rows.clear();
    for (const auto& f : rep.fields) {
      auto wide = [&](const std::string& method, auto value) {
        std::vector<std::string> r{method, f.field};
        for (std::size_t m = 1; m <= rep.m_max; ++m) r.push_back(format_double(value(m - 1)));
        rows.push_back(r);
      };
      auto pick = [&](const ErrorPair& e) { return rel ? e.relative : e.absolute; };
      wide(base, [&](std::size_t) { return pick(f.baseline); });
      wide("geim", [&](std::size_t k) { return pick(f.geim[k]); });
      wide("trgeim", [&](std::size_t k) { return pick(f.trgeim[k]); });
      wide("pbdw", [&](std::size_t k) { return pick(f.pbdw[k]); });
    }
    write_csv(dir / (rel ? "relative_errors.csv" : "absolute_errors.csv"), header, rows);
  }

  rows.clear();
  for (const auto& f : rep.fields)
    rows.push_back({f.field, std::to_string(rep.report_m), format_double(f.baseline.relative),
                    format_double(f.geim[rep.report_m - 1].relative), format_double(f.trgeim[rep.report_m - 1].relative),
                    format_double(f.pbdw[rep.report_m - 1].relative)});
  write_csv(dir / "bars.csv", {"field", "M", base, "geim", "trgeim", "pbdw"}, rows);

  rows.clear();
  for (const auto& f : rep.fields)
    for (std::size_t m = 1; m <= rep.m_max; ++m) rows.push_back({f.field, std::to_string(m), format_double(f.xi[m - 1])});
  write_csv(dir / "xi.csv", {"field", "M", "xi"}, rows);

  rows.clear();
  for (const auto& f : rep.fields)
    for (std::size_t m = 0; m < f.geim_training.size(); ++m)
      rows.push_back({f.field, std::to_string(m), format_double(f.geim_training[m])});
  write_csv(dir / "geim_training.csv", {"field", "m", "max_error"}, rows);

  rows.clear();
  for (const auto& f : rep.fields)
    for (std::size_t m = 0; m < f.inf_sup.size(); ++m)
      rows.push_back({f.field, std::to_string(m + 1), format_double(f.inf_sup[m])});
  write_csv(dir / "inf_sup.csv", {"field", "m", "beta"}, rows);

  if (rep.noise_draws > 0) {
    rows.clear();
    for (const auto& f : rep.fields)
      rows.push_back({f.field, std::to_string(rep.m_max), std::to_string(rep.noise_draws), format_double(f.noise_geim),
                      format_double(f.noise_trgeim)});
    write_csv(dir / "noise_study.csv", {"field", "M", "draws", "geim_eps", "trgeim_eps"}, rows);
  }

  // Global outputs.
  auto with_params = [&](std::vector<std::string> tail) {
    std::vector<std::string> h = rep.parameter_names;
    h.insert(h.end(), tail.begin(), tail.end());
    return h;
  };
  rows.clear();
  for (std::size_t i = 0; i < rep.parameters.size(); ++i) {
    auto r = parameter_cells(rep.parameters[i]);
    for (const auto* g : {&rep.truth, &rep.baseline, &rep.trgeim, &rep.pbdw}) r.push_back(format_double(g->power[i]));
    for (const auto* g : {&rep.truth, &rep.baseline, &rep.trgeim, &rep.pbdw}) r.push_back(format_double(g->temperature[i]));
    rows.push_back(r);
  }
  write_csv(dir / "global_outputs.csv",
            with_params({"P_truth", "P_" + base, "P_trgeim", "P_pbdw", "dT_truth", "dT_" + base, "dT_trgeim", "dT_pbdw"}),
            rows);

  const bool have_bands = !rep.trgeim_power.lower.empty();
  if (have_bands) {
    rows.clear();
    for (std::size_t i = 0; i < rep.parameters.size(); ++i) {
      auto r = parameter_cells(rep.parameters[i]);
      for (double v : {rep.truth.power[i], rep.trgeim_power.lower[i], rep.trgeim_power.upper[i], rep.pbdw_power.lower[i],
                       rep.pbdw_power.upper[i], rep.truth.temperature[i], rep.trgeim_temperature.lower[i],
                       rep.trgeim_temperature.upper[i], rep.pbdw_temperature.lower[i], rep.pbdw_temperature.upper[i]})
        r.push_back(format_double(v));
      rows.push_back(r);
    }
    write_csv(dir / "uq_bands.csv",
              with_params({"P_truth", "P_trgeim_lo", "P_trgeim_hi", "P_pbdw_lo", "P_pbdw_hi", "dT_truth", "dT_trgeim_lo",
                           "dT_trgeim_hi", "dT_pbdw_lo", "dT_pbdw_hi"}),
              rows);
  }

  // Charts.
  std::vector<double> ms;
  for (std::size_t m = 1; m <= rep.m_max; ++m) ms.push_back(static_cast<double>(m));
  for (const auto& f : rep.fields) {
    auto eps = [&](const std::vector<ErrorPair>& c) {
      std::vector<double> v;
      for (std::size_t m = 0; m < rep.m_max; ++m) v.push_back(c[m].relative);
      return v;
    };
    write_line_chart(dir / ("errors_" + f.field + ".svg"), {rep.benchmark + ": relative error, " + f.field, "M", "eps_M"},
                     {{base, ms, std::vector<double>(ms.size(), f.baseline.relative)},
                      {"GEIM", ms, eps(f.geim)},
                      {"TR-GEIM", ms, eps(f.trgeim)},
                      {"PBDW", ms, eps(f.pbdw)}},
                     true);
  }
  std::vector<std::string> cats;
  Series sb{base, {}, {}}, st{"TR-GEIM", {}, {}}, sp{"PBDW", {}, {}};
  for (const auto& f : rep.fields) {
    cats.push_back(f.field);
    sb.y.push_back(f.baseline.relative);
    st.y.push_back(f.trgeim[rep.report_m - 1].relative);
    sp.y.push_back(f.pbdw[rep.report_m - 1].relative);
  }
  write_bar_chart(dir / "bars.svg", {rep.benchmark + ": eps at M = " + std::to_string(rep.report_m), "field", "eps"}, cats,
                  {sb, st, sp}, true);

  // Line plots follow the last test parameter vector.
  std::vector<std::size_t> last;
  if (!rep.parameters.empty()) {
    const std::vector<double> tail(rep.parameters.back().begin() + 1, rep.parameters.back().end());
    for (std::size_t i = 0; i < rep.parameters.size(); ++i)
      if (std::vector<double>(rep.parameters[i].begin() + 1, rep.parameters[i].end()) == tail) last.push_back(i);
  }
  auto pick = [&](const std::vector<double>& v) {
    std::vector<double> out;
    for (auto i : last) out.push_back(v[i]);
    return out;
  };
  std::vector<double> tt = pick(rep.truth.time);
  write_line_chart(dir / "power.svg", {rep.benchmark + ": power", "t (s)", "P / P(0)"},
                   {{"FOM", tt, pick(rep.truth.power)},
                    {base, tt, pick(rep.baseline.power)},
                    {"TR-GEIM", tt, pick(rep.trgeim.power)},
                    {"PBDW", tt, pick(rep.pbdw.power)}},
                   false);
  write_line_chart(dir / "temperature.svg", {rep.benchmark + ": mean temperature rise", "t (s)", "<dT> (K)"},
                   {{"FOM", tt, pick(rep.truth.temperature)},
                    {base, tt, pick(rep.baseline.temperature)},
                    {"TR-GEIM", tt, pick(rep.trgeim.temperature)},
                    {"PBDW", tt, pick(rep.pbdw.temperature)}},
                   false);
  if (have_bands) {
    write_line_chart(dir / "power_band.svg", {rep.benchmark + ": power with 95% band", "t (s)", "P / P(0)"},
                     {{"FOM", tt, pick(rep.truth.power)},
                      {"TR-GEIM lo", tt, pick(rep.trgeim_power.lower)},
                      {"TR-GEIM hi", tt, pick(rep.trgeim_power.upper)},
                      {"PBDW lo", tt, pick(rep.pbdw_power.lower)},
                      {"PBDW hi", tt, pick(rep.pbdw_power.upper)}},
                     false);
  }

  // Residuals for every truth snapshot and final-time contour dumps.
  write_snapshots(dir / "residuals" / "trgeim", rep.trgeim_residual, {rep.benchmark, "residual_trgeim", 0});
  write_snapshots(dir / "residuals" / "pbdw", rep.pbdw_residual, {rep.benchmark, "residual_pbdw", 0});
  if (!last.empty()) {
    const std::size_t i = last.back();
    for (const auto& f : rep.fields) {
      const auto& name = f.field;
      const auto est_t = rep.trgeim_estimate.field(name, i);
      const auto est_p = rep.pbdw_estimate.field(name, i);
      dump_field(dir / "fields" / ("trgeim_" + name + ".csv"), est_t);
      dump_field(dir / "fields" / ("pbdw_" + name + ".csv"), est_p);
      dump_field(dir / "fields" / ("residual_trgeim_" + name + ".csv"), rep.trgeim_residual.field(name, i));
      dump_field(dir / "fields" / ("residual_pbdw_" + name + ".csv"), rep.pbdw_residual.field(name, i));
      dump_field(dir / "fields" / ("truth_" + name + ".csv"), rep.truth_set.field(name, i));
    }
  }
}

PipelineResult run_pipeline(const BenchmarkCase& bc, const PipelineOptions& options) {
  PipelineResult result;
  const fs::path out = options.out;
  fs::create_directories(out);
  const fs::path config_copy = out / "config.json";
  const bool cached = options.reuse && fs::exists(config_copy) && read_json(config_copy) == bc.config;

  auto stage = [&](const std::string& name, auto&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    say(options.log, "stage " + name);
    try {
      body();
    } catch (const Error& e) {
      throw Error(e.code(), "stage " + name + ": " + e.what());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::InvalidArgument, "stage " + name + ": " + e.what());
    }
    result.stage_seconds[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  SnapshotBundle snaps;
  stage("generate", [&] {
    const fs::path d = out / "snapshots";
    if (cached && fs::exists(d / "train" / "manifest.json") && fs::exists(d / "truth" / "manifest.json") &&
        fs::exists(d / "baseline" / "manifest.json")) {
      say(options.log, "reusing snapshots in " + d.string());
      snaps.train = read_snapshots(d / "train");
      snaps.truth = read_snapshots(d / "truth");
      snaps.baseline = read_snapshots(d / "baseline");
      return;
    }
    snaps = generate_snapshots(bc, options.log);
    write_snapshots(d / "train", snaps.train, {bc.name, "train", 0});
    write_snapshots(d / "truth", snaps.truth, {bc.name, "truth", 0});
    write_snapshots(d / "baseline", snaps.baseline, {bc.name, "baseline", 0});
    write_json(config_copy, bc.config);
  });

  OfflineModels models;
  stage("offline", [&] {
    const fs::path d = out / "models";
    bool have = cached;
    for (const auto& f : bc.fields)
      have = have && fs::exists(d / "geim" / f / "model.json") && fs::exists(d / "pbdw" / f / "model.json");
    if (have) {
      say(options.log, "reusing models in " + d.string());
      for (const auto& f : bc.fields) {
        models.geim.emplace(f, read_geim_model(d / "geim" / f));
        models.pbdw.emplace(f, read_pbdw_model(d / "pbdw" / f));
      }
      return;
    }
    const auto built = build_offline(bc, snaps.train, options.log);
    // Reload what was written so fresh and cached runs see identical models.
    for (const auto& f : bc.fields) {
      write_geim_model(d / "geim" / f, built.geim.at(f), f, bc.sigma(f));
      write_pbdw_model(d / "pbdw" / f, built.pbdw.at(f), f, bc.sigma(f));
      models.geim.emplace(f, read_geim_model(d / "geim" / f));
      models.pbdw.emplace(f, read_pbdw_model(d / "pbdw" / f));
    }
  });

  stage("online", [&] { result.report = run_online(bc, snaps, models, options.online, options.log); });
  stage("report", [&] { write_report(out / "report", result.report); });

  nlohmann::json timings;
  for (const auto& [k, v] : result.stage_seconds) timings[k] = v;
  write_json(out / "timings.json", timings);
  return result;
}

}  // namespace romassim::harness
