#pragma once

#include <gtest/gtest.h>

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include "romassim/error.hpp"
#include "romassim/fields/field.hpp"
#include "romassim/fields/mesh.hpp"
#include "romassim/sensing/rng.hpp"

namespace romassim::testing {

using fields::BoundaryTag;

inline std::array<BoundaryTag, 4> all_sides(BoundaryTag tag) { return {tag, tag, tag, tag}; }

inline fields::MeshPtr make_mesh(std::size_t nx, std::size_t ny, double dx, double dy,
                                 std::array<BoundaryTag, 4> sides = all_sides(BoundaryTag::Symmetry), int region = 1) {
  return std::make_shared<const fields::StructuredMesh>(fields::uniform_mesh(nx, ny, dx, dy, region, sides));
}

/// Standard normal entries; stream `seed`.
inline fields::ScalarField random_field(const fields::MeshPtr& mesh, std::uint64_t seed) {
  sensing::NormalStream rng(seed);
  fields::ScalarField f(mesh);
  for (std::size_t c = 0; c < f.size(); ++c) f[c] = rng.next();
  return f;
}

inline double uniform(std::uint64_t seed, std::uint64_t k, double lo = 0.0, double hi = 1.0) {
  return lo + (hi - lo) * sensing::to_open_unit(sensing::splitmix64(sensing::derive_seed(seed, k)));
}

inline std::filesystem::path config_path(const std::string& name) {
  return std::filesystem::path(ROMASSIM_SOURCE_DIR) / "configs" / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / "romassim_tests" / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

template <typename Fn>
ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an exception";
  return ErrorCode::InvalidArgument;
}

}  // namespace romassim::testing
