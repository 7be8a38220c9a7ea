#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "romassim/fields/field.hpp"
#include "romassim/neutronics/materials.hpp"
#include "romassim/reduction/snapshots.hpp"

namespace romassim::harness {

/// Average absolute (E_M) and relative (eps_M) L2 residual over a test set.
struct ErrorPair {
  double absolute = 0.0;
  double relative = 0.0;
};

ErrorPair compute_errors(const std::vector<fields::ScalarField>& truths,
                         const std::vector<fields::ScalarField>& estimates);

/// Initial-state values the outputs are measured against.
struct OutputReference {
  double power = 1.0;           // P(0)
  double temperature_l1 = 0.0;  // ||T(0)||_L1
};

struct GlobalOutputs {
  std::vector<double> time;
  std::vector<double> power;       // P(t) / P(0)
  std::vector<double> temperature; // <dT>(t)
};

/// P = P0 sum_g int Sigma_f,g phi_g.
double total_power(const std::vector<fields::ScalarField>& flux, const neutronics::CellMaterials& cells, double p0);
/// (||T||_L1 - ref) / |Omega|.
double mean_temperature_rise(const fields::ScalarField& temperature, double reference_l1);

/// Outputs of every snapshot in the set. Without a reference the first snapshot is used.
GlobalOutputs global_outputs(const reduction::SnapshotSet& set, const neutronics::CellMaterials& cells, double p0,
                             const OutputReference* reference = nullptr);

struct PercentileBand {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Per-index empirical band of the realizations (draw x index). The lower
/// end is order statistic floor(a (n - 1)) and the upper ceil((1 - a)(n - 1)),
/// a = (1 - level) / 2, so two draws give their min and max.
PercentileBand percentile_band(const std::vector<std::vector<double>>& realizations, double level);

/// Monte-Carlo band: draw k calls realize(derive_seed(seed, k)) and returns
/// one output series. Draws run in parallel.
PercentileBand uq_bands(const std::function<std::vector<double>(std::uint64_t)>& realize, std::size_t n_draws,
                        double level, std::uint64_t seed);

/// Fraction of indices where lower <= value <= upper.
double band_coverage(const PercentileBand& band, const std::vector<double>& values);

}  // namespace romassim::harness
