#include "romassim/sensing/rng.hpp"

#include <cmath>
#include <numbers>

namespace romassim::sensing {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

double NormalStream::next() {
  const std::uint64_t pair = counter_ / 2;
  const bool second = counter_ % 2 == 1;
  ++counter_;
  const double u1 = to_open_unit(splitmix64(seed_ + 2 * pair * 0x9E3779B97F4A7C15ULL));
  const double u2 = to_open_unit(splitmix64(seed_ + (2 * pair + 1) * 0x9E3779B97F4A7C15ULL));
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return second ? r * std::sin(angle) : r * std::cos(angle);
}

}  // namespace romassim::sensing
