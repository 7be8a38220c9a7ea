#include "romassim/harness/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "romassim/error.hpp"
#include "romassim/harness/parallel.hpp"
#include "romassim/sensing/rng.hpp"

namespace romassim::harness {

ErrorPair compute_errors(const std::vector<fields::ScalarField>& truths,
                         const std::vector<fields::ScalarField>& estimates) {
  if (truths.empty()) throw Error(ErrorCode::EmptySet, "no snapshots to compare");
  if (truths.size() != estimates.size()) throw Error(ErrorCode::SizeMismatch, "truth and estimate counts differ");
  ErrorPair e;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const double r = fields::l2_norm(truths[i] - estimates[i]);
    const double u = fields::l2_norm(truths[i]);
    e.absolute += r;
    e.relative += u > 0.0 ? r / u : (r > 0.0 ? INFINITY : 0.0);
  }
  e.absolute /= static_cast<double>(truths.size());
  e.relative /= static_cast<double>(truths.size());
  return e;
}

double total_power(const std::vector<fields::ScalarField>& flux, const neutronics::CellMaterials& cells, double p0) {
  if (flux.size() != cells.energy_groups) throw Error(ErrorCode::SizeMismatch, "flux group count");
  double p = 0.0;
  for (std::size_t g = 0; g < flux.size(); ++g) p += cells.nu_fission[g].dot(flux[g].values());
  return p0 * p * flux[0].mesh().cell_area() / neutronics::kNeutronsPerFission;
}

double mean_temperature_rise(const fields::ScalarField& temperature, double reference_l1) {
  return (fields::reduce_field(temperature, fields::Reduction::L1Norm) - reference_l1) / temperature.mesh().total_area();
}

GlobalOutputs global_outputs(const reduction::SnapshotSet& set, const neutronics::CellMaterials& cells, double p0,
                             const OutputReference* reference) {
  if (set.empty()) throw Error(ErrorCode::EmptySet, "no snapshots");
  if (!set.has_field("T")) throw Error(ErrorCode::MissingField, "T");
  for (std::size_t g = 0; g < cells.energy_groups; ++g)
    if (!set.has_field("phi" + std::to_string(g + 1))) throw Error(ErrorCode::MissingField, "phi" + std::to_string(g + 1));

  auto flux_of = [&](std::size_t i) {
    std::vector<fields::ScalarField> f;
    for (std::size_t g = 0; g < cells.energy_groups; ++g) f.push_back(set.field("phi" + std::to_string(g + 1), i));
    return f;
  };
  OutputReference ref;
  if (reference) {
    ref = *reference;
  } else {
    ref.power = total_power(flux_of(0), cells, p0);
    ref.temperature_l1 = fields::reduce_field(set.field("T", 0), fields::Reduction::L1Norm);
  }
  GlobalOutputs out;
  for (std::size_t i = 0; i < set.size(); ++i) {
    out.time.push_back(set.parameters(i).at(0));
    const double p = total_power(flux_of(i), cells, p0);
    out.power.push_back(ref.power != 0.0 ? p / ref.power : p);
    out.temperature.push_back(mean_temperature_rise(set.field("T", i), ref.temperature_l1));
  }
  return out;
}

PercentileBand percentile_band(const std::vector<std::vector<double>>& realizations, double level) {
  if (realizations.size() < 2) throw Error(ErrorCode::InvalidArgument, "at least two draws are needed");
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::InvalidArgument, "level must lie in (0, 1)");
  const std::size_t n = realizations.size(), len = realizations[0].size();
  const double a = 0.5 * (1.0 - level);
  const auto lo = static_cast<std::size_t>(std::floor(a * static_cast<double>(n - 1) + 1e-12));
  const auto hi = static_cast<std::size_t>(std::ceil((1.0 - a) * static_cast<double>(n - 1) - 1e-12));
  PercentileBand band;
  std::vector<double> column(n);
  for (std::size_t k = 0; k < len; ++k) {
    for (std::size_t d = 0; d < n; ++d) {
      if (realizations[d].size() != len) throw Error(ErrorCode::SizeMismatch, "realizations differ in length");
      column[d] = realizations[d][k];
    }
    std::sort(column.begin(), column.end());
    band.lower.push_back(column[lo]);
    band.upper.push_back(column[std::min(hi, n - 1)]);
  }
  return band;
}

PercentileBand uq_bands(const std::function<std::vector<double>(std::uint64_t)>& realize, std::size_t n_draws,
                        double level, std::uint64_t seed) {
  std::vector<std::vector<double>> draws(n_draws);
  parallel_for(n_draws, [&](std::size_t k) { draws[k] = realize(sensing::derive_seed(seed, k)); });
  return percentile_band(draws, level);
}

double band_coverage(const PercentileBand& band, const std::vector<double>& values) {
  if (values.size() != band.lower.size()) throw Error(ErrorCode::SizeMismatch, "band and series differ in length");
  if (values.empty()) return 0.0;
  std::size_t inside = 0;
  for (std::size_t k = 0; k < values.size(); ++k)
    if (band.lower[k] <= values[k] && values[k] <= band.upper[k]) ++inside;
  return static_cast<double>(inside) / static_cast<double>(values.size());
}

}  // namespace romassim::harness
