#pragma once

#include <cstdint>

namespace romassim::sensing {

/// Counter-based normal generator. Value k of stream `seed` is a pure
/// function of (seed, k): SplitMix64 hashes the counter into uniform bits and
/// a Box-Muller transform maps pairs of uniforms to two normals.
class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : seed_(seed) {}

  double next();
  std::uint64_t position() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Uniform in (0, 1) from the top 52 bits, offset by half a step.
double to_open_unit(std::uint64_t bits);
/// Derives an independent seed for a sub-stream (e.g. one noise draw).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace romassim::sensing
