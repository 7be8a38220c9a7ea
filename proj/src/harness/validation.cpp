#include "romassim/harness/validation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>

#include "romassim/error.hpp"
#include "romassim/harness/storage.hpp"
#include "romassim/multiphysics/schedule.hpp"
#include "romassim/neutronics/diffusion.hpp"
#include "romassim/reduction/pod.hpp"
#include "romassim/sensing/rng.hpp"
#include "romassim/sensing/sensors.hpp"
#include "romassim/thermal/heat.hpp"

namespace romassim::harness {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

CheckResult timed(int id, const std::string& name, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.id = id;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<fields::ScalarField> field_list(const reduction::SnapshotSet& set, const std::string& field) {
  std::vector<fields::ScalarField> out;
  for (std::size_t i = 0; i < set.size(); ++i) out.push_back(set.field(field, i));
  return out;
}

Eigen::MatrixXd to_matrix(const std::vector<fields::ScalarField>& fs) {
  Eigen::MatrixXd m(fs.at(0).values().size(), static_cast<Eigen::Index>(fs.size()));
  for (std::size_t i = 0; i < fs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = fs[i].values();
  return m;
}

double uniform(std::uint64_t seed, std::uint64_t k, double lo, double hi) {
  return lo + (hi - lo) * sensing::to_open_unit(sensing::splitmix64(sensing::derive_seed(seed, k)));
}

// Smooth two-bump family on a 32 x 32 square; three parameters.
struct Family {
  fields::MeshPtr mesh;
  reduction::SnapshotSet train;
  reduction::SnapshotSet test;
  sensing::SensorLibrary library;
};

Family synthetic_family(std::uint64_t seed) {
  using fields::BoundaryTag;
  Family f;
  f.mesh = std::make_shared<const fields::StructuredMesh>(fields::uniform_mesh(
      32, 32, 1.0, 1.0, 1, {BoundaryTag::Symmetry, BoundaryTag::Symmetry, BoundaryTag::Symmetry, BoundaryTag::Symmetry}));
  const std::vector<std::string> names{"a", "b", "w"};
  f.train = reduction::SnapshotSet(f.mesh, names);
  f.test = f.train;
  auto make = [&](std::uint64_t s, std::size_t count, reduction::SnapshotSet& set) {
    for (std::size_t i = 0; i < count; ++i) {
      const double a = uniform(s, 3 * i, 8.0, 24.0);
      const double b = uniform(s, 3 * i + 1, 8.0, 24.0);
      const double w = uniform(s, 3 * i + 2, 3.0, 6.0);
      const auto u = fields::sample_field(f.mesh, [&](double x, double y) {
        return std::exp(-((x - a) * (x - a) + (y - b) * (y - b)) / (2 * w * w)) +
               0.5 * std::exp(-((x - b) * (x - b) + (y - a) * (y - a)) / (4.5 * w * w));
      });
      set.add({a, b, w}, {{"u", u.values()}});
    }
  };
  make(sensing::derive_seed(seed, 0), 64, f.train);
  make(sensing::derive_seed(seed, 1), 10, f.test);
  f.library = sensing::build_sensor_library(f.mesh, 2, 1.0);
  return f;
}

struct SavedRun {
  reduction::SnapshotSet train;
  reduction::SnapshotSet truth;
  std::map<std::string, geim::GeimModel> geim;
  std::map<std::string, pbdw::PbdwModel> pbdw;
  PipelineResult result;
  double seconds = 0.0;
  std::string error;

  void require() const {
    if (!error.empty()) throw Error(ErrorCode::InvalidArgument, "pipeline failed: " + error);
  }
};

SavedRun run_case(const BenchmarkCase& bc, const fs::path& out, const Logger& log) {
  SavedRun run;
  PipelineOptions opt;
  opt.out = out;
  opt.reuse = false;
  opt.log = log;
  const auto t0 = std::chrono::steady_clock::now();
  run.result = run_pipeline(bc, opt);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  run.train = read_snapshots(out / "snapshots" / "train");
  run.truth = read_snapshots(out / "snapshots" / "truth");
  for (const auto& f : bc.fields) {
    run.geim.emplace(f, read_geim_model(out / "models" / "geim" / f));
    run.pbdw.emplace(f, read_pbdw_model(out / "models" / "pbdw" / f));
  }
  return run;
}

// ----- individual criteria -----

CheckResult check_infinite_medium(const fs::path& config_dir) {
  return timed(1, "infinite-medium k", [&](CheckResult& r) {
    const auto bc = load_case(config_dir / "iaea2d.json");
    auto table = bc.model.materials;
    const int region = table.regions.begin()->first;
    auto mat = table.regions.at(region);
    for (auto& g : mat.groups) g.buckling = 0.0;
    table.regions = {{1, mat}};
    using fields::BoundaryTag;
    auto mesh = std::make_shared<const fields::StructuredMesh>(fields::uniform_mesh(
        4, 4, 5.0, 5.0, 1, {BoundaryTag::Symmetry, BoundaryTag::Symmetry, BoundaryTag::Symmetry, BoundaryTag::Symmetry}));
    const auto cells = neutronics::resolve_cells(*mesh, table);
    const auto t0 = std::chrono::steady_clock::now();
    const auto state = neutronics::solve_keff(mesh, cells);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Two-group infinite medium, all fast neutrons born in group 1.
    const auto& g1 = mat.groups[0];
    const auto& g2 = mat.groups[1];
    const double s12 = mat.scatter(0, 1);
    const double oracle = (g1.nu_fission + g2.nu_fission * s12 / g2.absorption) / (g1.absorption + s12);
    const double dk = std::abs(state.k_eff - 1.05882);
    r.pass = dk <= 1e-5 && std::abs(state.k_eff - oracle) <= 1e-8 && secs < 1.0;
    r.detail = "k=" + num(state.k_eff) + " formula=" + num(oracle) + " |k-1.05882|=" + num(dk) + " (<=1e-5), " +
               num(secs) + " s (<1 s)";
  });
}

struct StructuralTargets {
  // name, train set, GEIM and PBDW models, and the truths for the equivalence test
  std::string label;
  const reduction::SnapshotSet* train = nullptr;
  std::string field;
  const geim::GeimModel* geim = nullptr;
  const pbdw::PbdwModel* pbdw = nullptr;
  std::vector<fields::ScalarField> truths;
  std::size_t pod_n = 5;
};

CheckResult check_geim_structure(const std::vector<StructuralTargets>& targets) {
  return timed(2, "GEIM structure", [&](CheckResult& r) {
    GeimStructure worst;
    std::size_t runs = 0;
    for (const auto& t : targets) {
      if (!t.geim) continue;
      const auto s = geim_structure(*t.geim, *t.train, t.field);
      worst.upper = std::max(worst.upper, s.upper);
      worst.diagonal = std::max(worst.diagonal, s.diagonal);
      worst.off_diagonal = std::max(worst.off_diagonal, s.off_diagonal);
      worst.reconstruction = std::max(worst.reconstruction, s.reconstruction);
      ++runs;
    }
    r.pass = runs > 0 && worst.upper <= 1e-10 && worst.diagonal <= 1e-10 && worst.off_diagonal <= 1.0 + 1e-10 &&
             worst.reconstruction < 1e-10;
    r.detail = std::to_string(runs) + " runs: max upper " + num(worst.upper) + ", diag dev " + num(worst.diagonal) +
               ", max |offdiag| " + num(worst.off_diagonal) + ", magic-snapshot rel err " + num(worst.reconstruction);
  });
}

CheckResult check_pod_identity(const std::vector<StructuralTargets>& targets) {
  return timed(3, "POD energy identity", [&](CheckResult& r) {
    double gap = 0.0, ortho = 0.0;
    std::size_t runs = 0;
    for (const auto& t : targets) {
      const auto p = pod_identity(*t.train, t.field, t.pod_n);
      gap = std::max(gap, p.relative_gap());
      ortho = std::max(ortho, p.orthonormality);
      ++runs;
    }
    r.pass = runs > 0 && gap <= 1e-8 && ortho <= 1e-10;
    r.detail = std::to_string(runs) + " bases: max relative gap " + num(gap) + " (<=1e-8), orthonormality " +
               num(ortho) + " (<=1e-10)";
  });
}

CheckResult check_equivalence(const std::vector<StructuralTargets>& targets) {
  return timed(4, "PBDW/GEIM equivalence", [&](CheckResult& r) {
    double gap = 0.0;
    std::size_t runs = 0;
    for (const auto& t : targets) {
      if (!t.geim || t.truths.empty()) continue;
      const std::size_t n = std::min<std::size_t>(t.geim->size(), 8);
      gap = std::max(gap, pbdw_geim_gap(*t.geim, n, t.truths));
      ++runs;
    }
    r.pass = runs > 0 && gap <= 1e-8;
    r.detail = std::to_string(runs) + " models x 10 snapshots: max relative difference " + num(gap) + " (<=1e-8)";
  });
}

CheckResult check_inf_sup(const std::vector<StructuralTargets>& targets) {
  return timed(5, "inf-sup monotonicity", [&](CheckResult& r) {
    double drop = 0.0, spot = 0.0;
    std::size_t runs = 0;
    for (const auto& t : targets) {
      if (!t.pbdw) continue;
      drop = std::max(drop, inf_sup_drop(*t.pbdw));
      spot = std::max(spot, inf_sup_spot_gap(*t.pbdw, 7 + runs));
      ++runs;
    }
    r.pass = runs > 0 && drop <= 1e-12 && spot <= 1e-3;
    r.detail = std::to_string(runs) + " SGreedy runs: max decrease " + num(drop) + " (<=1e-12), brute-force gap " +
               num(spot) + " (<=1e-3)";
  });
}

CheckResult check_time_order() {
  return timed(6, "time-integration order", [&](CheckResult& r) {
    const auto h = heat_decay_errors(0.1);
    const auto c = precursor_decay_errors(0.1);
    const double rh1 = h[0] / h[1], rh2 = h[1] / h[2];
    const double rc1 = c[0] / c[1], rc2 = c[1] / c[2];
    auto ok = [](double x) { return x >= 1.7 && x <= 2.3; };
    r.pass = ok(rh1) && ok(rh2) && ok(rc1) && ok(rc2);
    r.detail = "heat ratios " + num(rh1) + ", " + num(rh2) + "; precursor ratios " + num(rc1) + ", " + num(rc2) +
               " (in [1.7, 2.3])";
  });
}

CheckResult check_schedule() {
  return timed(10, "TWIGL schedule continuity", [&](CheckResult& r) {
    const auto s = multiphysics::twigl_schedule(1);
    const double eps = 1e-12;
    const double left = multiphysics::transient_factor(s, 1, 1, 0.2 - eps);
    const double at = multiphysics::transient_factor(s, 1, 1, 0.2);
    const double right = multiphysics::transient_factor(s, 1, 1, 0.2 + eps);
    const double worst = std::max({std::abs(left - 0.97666), std::abs(at - 0.97666), std::abs(right - 0.97666)});
    r.pass = worst <= 1e-4;
    r.detail = "ramp side " + num(left) + ", t=0.2 " + num(at) + ", step side " + num(right) + "; max |f-0.97666| " +
               num(worst) + " (<=1e-4)";
  });
}

double best_up_to(const std::vector<ErrorPair>& curve, std::size_t m) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < std::min(m, curve.size()); ++k) best = std::min(best, curve[k].relative);
  return best;
}

CheckResult check_iaea_bias(const SavedRun& run) {
  return timed(7, "bias correction IAEA", [&](CheckResult& r) {
    run.require();
    const auto& rep = run.result.report;
    const std::size_t m = rep.m_max;
    bool pass = m == 15;
    std::ostringstream d;
    d << "M=" << m << ";";
    for (const auto& f : rep.fields) {
      const double tr = f.trgeim[m - 1].relative, pb = f.pbdw[m - 1].relative, base = f.baseline.relative;
      pass = pass && tr < base && pb < base;
      d << " " << f.field << " aFOM " << num(base) << " TR-GEIM " << num(tr) << " PBDW " << num(pb) << ";";
      if (f.field == "T" || f.field == "phi1") {
        const double btr = best_up_to(f.trgeim, 10), bpb = best_up_to(f.pbdw, 10);
        pass = pass && btr < 0.02 && bpb < 0.02;
        d << " best M<=10 " << num(btr) << "/" << num(bpb) << " (<0.02);";
      }
    }
    pass = pass && run.seconds < 600.0;
    d << " pipeline " << num(run.seconds) << " s (<600 s)";
    r.pass = pass;
    r.detail = d.str();
  });
}

CheckResult check_twigl_bias(const SavedRun& run) {
  return timed(8, "bias correction TWIGL-A", [&](CheckResult& r) {
    run.require();
    const auto& rep = run.result.report;
    const std::size_t m = rep.m_max;
    bool pass = m == 25;
    std::ostringstream d;
    d << "M=" << m << ";";
    for (const auto& f : rep.fields) {
      if (f.field.rfind("phi", 0) != 0) continue;
      const double tr = f.trgeim[m - 1].relative, pb = f.pbdw[m - 1].relative, base = f.baseline.relative;
      pass = pass && tr * 10.0 <= base && pb * 10.0 <= base;
      d << " " << f.field << " aFOM " << num(base) << " TR-GEIM " << num(tr) << " (x" << num(base / tr) << ") PBDW "
        << num(pb) << " (x" << num(base / pb) << ");";
    }
    pass = pass && run.seconds < 900.0;
    d << " pipeline " << num(run.seconds) << " s (<900 s)";
    r.pass = pass;
    r.detail = d.str();
  });
}

CheckResult check_noise(const SavedRun& run) {
  return timed(9, "noise robustness", [&](CheckResult& r) {
    run.require();
    const auto& rep = run.result.report;
    bool pass = rep.noise_draws == 50 && rep.m_max == 15;
    std::ostringstream d;
    d << rep.noise_draws << " draws at M=" << rep.m_max << ";";
    for (const auto& f : rep.fields) {
      pass = pass && f.noise_trgeim <= f.noise_geim;
      d << " " << f.field << " GEIM " << num(f.noise_geim) << " TR-GEIM " << num(f.noise_trgeim) << ";";
    }
    r.pass = pass;
    r.detail = d.str();
  });
}

CheckResult check_uq(const SavedRun& run, std::size_t draws) {
  return timed(11, "UQ band coverage", [&](CheckResult& r) {
    run.require();
    const auto& rep = run.result.report;
    const double ct = band_coverage(rep.trgeim_power, rep.truth.power);
    const double cp = band_coverage(rep.pbdw_power, rep.truth.power);
    r.pass = draws == 100 && ct >= 0.9 && cp >= 0.9;
    r.detail = std::to_string(draws) + " draws, " + std::to_string(rep.truth.power.size()) +
               " times: FOM P(t) inside TR-GEIM band " + num(ct) + ", PBDW band " + num(cp) + " (>=0.9)";
  });
}

std::map<std::string, std::string> csv_contents(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), dir).generic_string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

class ThreadOverride {
 public:
  explicit ThreadOverride(const std::string& value) {
    if (const char* v = std::getenv("ROMASSIM_THREADS")) saved_ = v, had_ = true;
    ::setenv("ROMASSIM_THREADS", value.c_str(), 1);
  }
  ~ThreadOverride() {
    if (had_) ::setenv("ROMASSIM_THREADS", saved_.c_str(), 1);
    else ::unsetenv("ROMASSIM_THREADS");
  }

 private:
  std::string saved_;
  bool had_ = false;
};

BenchmarkCase tiny_case(const fs::path& config_dir) {
  auto cfg = read_json(config_dir / "twigl2d_a_reduced.json");
  cfg["benchmark"] = "TWIGL2D_A_TINY";
  cfg["geometry"]["refine"] = 2;
  cfg["time"]["t_end"] = 0.4;
  cfg["time"]["train"] = {{"lo", 0.0}, {"hi", 0.2}, {"include_lo", false}};
  cfg["time"]["test"] = {{"lo", 0.2}, {"hi", 0.4}, {"include_lo", false}};
  cfg["parameters"][0]["train"] = {{"lo", 0.001}, {"hi", 0.01}, {"count", 2}};
  cfg["parameters"][0]["test"] = {0.0055};
  cfg["reduction"]["geim_m_max"] = 5;
  cfg["reduction"]["pbdw_m_max"] = 5;
  cfg["reduction"]["pbdw_n"] = 2;
  cfg["reduction"]["validation_stride"] = 2;
  cfg["online"]["uq_draws"] = 6;
  cfg["online"]["noise_draws"] = 4;
  return parse_case(cfg, config_dir);
}

CheckResult check_determinism(const fs::path& config_dir, const fs::path& work, const Logger& log) {
  return timed(12, "determinism", [&](CheckResult& r) {
    const auto bc = tiny_case(config_dir);
    std::map<std::string, std::string> first, second;
    {
      ThreadOverride t("1");
      PipelineOptions opt{work / "a", false, {}, log};
      run_pipeline(bc, opt);
      first = csv_contents(work / "a" / "report");
    }
    {
      ThreadOverride t("3");
      PipelineOptions opt{work / "b", false, {}, log};
      run_pipeline(bc, opt);
      second = csv_contents(work / "b" / "report");
    }
    std::size_t differ = 0;
    for (const auto& [k, v] : first) {
      const auto it = second.find(k);
      if (it == second.end() || it->second != v) ++differ;
    }
    differ += second.size() > first.size() ? second.size() - first.size() : 0;
    r.pass = !first.empty() && differ == 0 && first.size() == second.size();
    r.detail = std::to_string(first.size()) + " CSV files compared across runs with 1 and 3 threads, " +
               std::to_string(differ) + " differ";
  });
}

}  // namespace

Suite parse_suite(const std::string& name) {
  if (name == "fast") return Suite::Fast;
  if (name == "full") return Suite::Full;
  throw Error(ErrorCode::InvalidArgument, "unknown suite '" + name + "' (fast, full)");
}

std::string format_check(const CheckResult& r) {
  char secs[32];
  std::snprintf(secs, sizeof secs, "%.2f", r.seconds);
  return std::string(r.pass ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + ": " + r.detail + " (" +
         secs + " s)";
}

GeimStructure geim_structure(const geim::GeimModel& model, const reduction::SnapshotSet& train,
                             const std::string& field) {
  GeimStructure s;
  const auto& b = model.matrix;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      const double v = std::abs(b(i, j));
      if (i == j) s.diagonal = std::max(s.diagonal, std::abs(b(i, j) - 1.0));
      else s.off_diagonal = std::max(s.off_diagonal, v);
      if (j > i) s.upper = std::max(s.upper, v);
    }
  }
  for (std::size_t m = 1; m <= model.size(); ++m) {
    const auto u = train.field(field, model.snapshot_indices.at(m - 1));
    const auto est = geim::geim_online(model, geim::magic_readings(model, u, m), m);
    s.reconstruction = std::max(s.reconstruction, fields::l2_norm(u - est.field) / fields::l2_norm(u));
  }
  return s;
}

double PodIdentity::relative_gap() const {
  return std::abs(discarded - projection) / std::max(discarded, std::numeric_limits<double>::min());
}

PodIdentity pod_identity(const reduction::SnapshotSet& train, const std::string& field, std::size_t n) {
  const auto basis = reduction::compute_pod(train, field, n);
  PodIdentity p;
  p.discarded = basis.eigenvalues.tail(basis.eigenvalues.size() - static_cast<Eigen::Index>(n)).sum();
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto u = train.field(field, i);
    const auto proj = reduction::pod_reconstruct(basis, reduction::pod_project(basis, u));
    const double e = fields::l2_norm(u - proj);
    p.projection += e * e;
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      p.orthonormality = std::max(
          p.orthonormality, std::abs(fields::inner_product(basis.modes[a], basis.modes[b]) - (a == b ? 1.0 : 0.0)));
  return p;
}

double pbdw_geim_gap(const geim::GeimModel& model, std::size_t n, const std::vector<fields::ScalarField>& truths) {
  std::vector<fields::ScalarField> z(model.magic_functions.begin(), model.magic_functions.begin() + static_cast<long>(n));
  sensing::SensorLibrary sensors(model.magic_sensors.begin(), model.magic_sensors.begin() + static_cast<long>(n));
  const auto p = pbdw::assemble_pbdw(std::move(z), std::move(sensors));
  double gap = 0.0;
  for (const auto& u : truths) {
    const auto y = geim::magic_readings(model, u, n);
    const auto g = geim::geim_online(model, y, n).field;
    const auto e = pbdw::pbdw_online(p, y, 0.0, n).field;
    gap = std::max(gap, fields::l2_norm(g - e) / fields::l2_norm(g));
  }
  return gap;
}

double brute_force_inf_sup(const std::vector<fields::ScalarField>& z, const std::vector<fields::ScalarField>& u,
                           std::uint64_t seed, std::size_t restarts, std::size_t steps) {
  const double area = z.at(0).mesh().cell_area();
  const Eigen::MatrixXd zm = to_matrix(z), um = to_matrix(u);
  const Eigen::MatrixXd gzz = zm.transpose() * zm * area;
  const Eigen::MatrixXd guz = um.transpose() * zm * area;
  const Eigen::MatrixXd guu = um.transpose() * um * area;
  // ||P_U z||^2 = c^T Guz^T Guu^+ Guz c
  const Eigen::MatrixXd proj = guz.transpose() * guu.completeOrthogonalDecomposition().solve(guz);
  const auto n = static_cast<Eigen::Index>(z.size());
  auto ratio = [&](const Eigen::VectorXd& c) { return c.dot(proj * c) / c.dot(gzz * c); };

  sensing::NormalStream rng(seed);
  auto gaussian = [&] {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.next();
    return v;
  };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < restarts; ++r) {
    Eigen::VectorXd c = gaussian();
    c /= c.norm();
    double val = ratio(c);
    double step = 0.5;
    for (std::size_t s = 0; s < steps; ++s) {
      Eigen::VectorXd trial = c + step * gaussian();
      trial /= trial.norm();
      const double tv = ratio(trial);
      if (tv < val) {
        c = trial;
        val = tv;
      } else {
        step *= 0.97;
      }
    }
    best = std::min(best, val);
  }
  return std::sqrt(std::max(best, 0.0));
}

double inf_sup_drop(const pbdw::PbdwModel& model) {
  const auto& t = model.inf_sup_table;
  double drop = 0.0;
  for (Eigen::Index n = 0; n < t.rows(); ++n)
    for (Eigen::Index m = 1; m < t.cols(); ++m) drop = std::max(drop, t(n, m - 1) - t(n, m));
  return drop;
}

double inf_sup_spot_gap(const pbdw::PbdwModel& model, std::uint64_t seed) {
  const std::size_t nn = model.n(), mm = model.m();
  std::vector<std::pair<std::size_t, std::size_t>> spots{{1, 1}, {nn, nn}, {nn, mm}, {std::max<std::size_t>(1, nn / 2), (nn + mm) / 2}};
  double gap = 0.0;
  std::size_t k = 0;
  for (auto [n, m] : spots) {
    if (n > nn || m > mm || m < n) continue;
    const std::vector<fields::ScalarField> z(model.background.begin(), model.background.begin() + static_cast<long>(n));
    const std::vector<fields::ScalarField> u(model.update.begin(), model.update.begin() + static_cast<long>(m));
    const double bf = brute_force_inf_sup(z, u, sensing::derive_seed(seed, k++));
    gap = std::max(gap, std::abs(bf - model.inf_sup_table(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(m - 1))));
  }
  return gap;
}

std::vector<double> heat_decay_errors(double dt) {
  // Neumann slab: cos(pi (i + 1/2) / n) is an exact discrete eigenvector.
  using fields::BoundaryTag;
  const std::size_t nx = 20;
  const double h = 0.1, t_end = 1.0;
  auto mesh = std::make_shared<const fields::StructuredMesh>(fields::uniform_mesh(
      nx, 1, h, h, 1, {BoundaryTag::Symmetry, BoundaryTag::Symmetry, BoundaryTag::Symmetry, BoundaryTag::Symmetry}));
  thermal::ThermalProperties props;
  props.regions[1] = {1.0, 1.0, 1.0};
  const double mu = 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi / (2.0 * nx)), 2);
  auto mode = [&](double amp) {
    return fields::sample_field(mesh, [&](double x, double) { return 600.0 + amp * std::cos(std::numbers::pi * x / (h * nx)); });
  };
  const fields::ScalarField q(mesh, 0.0);
  const auto exact = mode(50.0 * std::exp(-mu * t_end));
  std::vector<double> errors;
  for (int level = 0; level < 3; ++level) {
    const double step = dt / std::pow(2.0, level);
    const auto nsteps = static_cast<std::size_t>(std::llround(t_end / step));
    thermal::HeatStepper stepper(mesh, props);
    auto t = mode(50.0);
    for (std::size_t k = 0; k < nsteps; ++k) t = stepper.advance(t, q, step);
    errors.push_back(fields::l2_norm(t - exact));
  }
  return errors;
}

std::vector<double> precursor_decay_errors(double dt) {
  // Without fission the precursors only decay: c(t) = c0 exp(-lambda t).
  using fields::BoundaryTag;
  auto mesh = std::make_shared<const fields::StructuredMesh>(fields::uniform_mesh(
      2, 2, 1.0, 1.0, 1, {BoundaryTag::Symmetry, BoundaryTag::Symmetry, BoundaryTag::Symmetry, BoundaryTag::Symmetry}));
  neutronics::MaterialTable table;
  table.energy_groups = 2;
  neutronics::RegionMaterial mat;
  mat.groups = {{1.4, 0.01, 0.0, 1.0, 0.0, 1e7}, {0.4, 0.15, 0.0, 0.0, 0.0, 1e5}};
  mat.scatter = Eigen::MatrixXd::Zero(2, 2);
  mat.scatter(0, 1) = 0.01;
  table.regions[1] = mat;
  table.kinetics = neutronics::make_kinetics({0.003, 0.004}, {0.5, 2.0});
  const auto cells = neutronics::resolve_cells(*mesh, table);
  const double t_end = 1.0;

  std::vector<double> errors;
  for (int level = 0; level < 3; ++level) {
    const double step = dt / std::pow(2.0, level);
    const auto nsteps = static_cast<std::size_t>(std::llround(t_end / step));
    neutronics::NeutronicState s;
    s.flux = {fields::ScalarField(mesh, 1.0), fields::ScalarField(mesh, 1.0)};
    s.precursors = {fields::ScalarField(mesh, 1.0), fields::ScalarField(mesh, 1.0)};
    neutronics::NeutronicsStepper stepper(mesh);
    for (std::size_t k = 0; k < nsteps; ++k) s = stepper.advance(s, step, cells, 1.0);
    double sq = 0.0;
    for (std::size_t j = 0; j < 2; ++j) {
      const fields::ScalarField exact(mesh, std::exp(-table.kinetics.lambda[j] * t_end));
      const double e = fields::l2_norm(s.precursors[j] - exact);
      sq += e * e;
    }
    errors.push_back(std::sqrt(sq));
  }
  return errors;
}

std::vector<CheckResult> run_acceptance(const ValidationOptions& options) {
  const fs::path work = options.work_dir.empty() ? fs::temp_directory_path() / "romassim_validate" : options.work_dir;
  fs::create_directories(work);
  const fs::path configs = options.config_dir.empty() ? fs::path(ROMASSIM_SOURCE_DIR) / "configs" : options.config_dir;
  const auto& log = options.log;
  std::vector<CheckResult> out;

  say(log, "synthetic family");
  const auto family = synthetic_family(20240301);
  auto fam_geim = geim::geim_greedy(family.train, "u", family.library, 12, 0.0);
  const auto fam_pod = reduction::compute_pod(family.train, "u", 4);
  const auto fam_pbdw = pbdw::sgreedy(fam_pod.modes, family.library, 12);

  std::vector<StructuralTargets> targets;
  targets.push_back({"synthetic", &family.train, "u", &fam_geim, &fam_pbdw, field_list(family.test, "u"), 4});

  SavedRun iaea, twigl;
  if (options.suite == Suite::Full) {
    say(log, "IAEA pipeline");
    try {
      iaea = run_case(load_case(configs / "iaea2d.json"), work / "iaea2d", log);
    } catch (const std::exception& e) {
      iaea.error = e.what();
    }
    say(log, "TWIGL-A pipeline");
    try {
      twigl = run_case(load_case(configs / "twigl2d_a_reduced.json"), work / "twigl2d_a_reduced", log);
    } catch (const std::exception& e) {
      twigl.error = e.what();
    }
    for (auto* run : {&iaea, &twigl}) {
      if (!run->error.empty()) continue;
      for (const auto& [f, g] : run->geim) {
        // Ten test snapshots drawn at random from the truth set.
        std::vector<fields::ScalarField> truths;
        const std::uint64_t s = sensing::derive_seed(20240302, targets.size());
        for (std::size_t k = 0; k < 10; ++k) {
          const auto i = static_cast<std::size_t>(uniform(s, k, 0.0, static_cast<double>(run->truth.size())));
          truths.push_back(run->truth.field(f, std::min(i, run->truth.size() - 1)));
        }
        targets.push_back({run == &iaea ? "iaea" : "twigl", &run->train, f, &g, &run->pbdw.at(f), std::move(truths),
                           run->pbdw.at(f).n()});
      }
    }
  }

  out.push_back(check_infinite_medium(configs));
  out.push_back(check_geim_structure(targets));
  out.push_back(check_pod_identity(targets));
  out.push_back(check_equivalence(targets));
  out.push_back(check_inf_sup(targets));
  out.push_back(check_time_order());
  if (options.suite == Suite::Full) {
    out.push_back(check_iaea_bias(iaea));
    out.push_back(check_twigl_bias(twigl));
    out.push_back(check_noise(iaea));
  }
  out.push_back(check_schedule());
  if (options.suite == Suite::Full) out.push_back(check_uq(iaea, load_case(configs / "iaea2d.json").online.uq_draws));
  say(log, "determinism runs");
  out.push_back(check_determinism(configs, work / "determinism", log));
  return out;
}

}  // namespace romassim::harness
