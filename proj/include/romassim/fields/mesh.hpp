#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace romassim::fields {

enum class BoundaryTag { Vacuum, Symmetry, FixedTemperature };

enum class Side { Left = 0, Right = 1, Bottom = 2, Top = 3 };

BoundaryTag parse_boundary_tag(const std::string& name);
std::string to_string(BoundaryTag tag);

/// Region map as read from a mask file. Row j = 0 is the bottom row (y = y0).
struct RegionMask {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<int> ids;  // x fastest

  int at(std::size_t i, std::size_t j) const { return ids[j * nx + i]; }
};

RegionMask read_region_mask(const std::filesystem::path& path);
RegionMask parse_region_mask(const std::string& text);
void write_region_mask(const std::filesystem::path& path, const RegionMask& mask);

/// Everything needed to build a mesh. Each mask cell is split into
/// refine x refine mesh cells; a mask id of 0 marks a gap.
struct MeshDescription {
  RegionMask mask;
  double mask_dx = 1.0;
  double mask_dy = 1.0;
  std::size_t refine = 1;
  double x0 = 0.0;
  double y0 = 0.0;
  std::array<BoundaryTag, 4> sides{BoundaryTag::Symmetry, BoundaryTag::Symmetry,
                                   BoundaryTag::Symmetry, BoundaryTag::Symmetry};
};

class StructuredMesh {
 public:
  StructuredMesh() = default;
  StructuredMesh(std::size_t nx, std::size_t ny, double dx, double dy, double x0, double y0,
                 std::vector<int> region_id, std::array<BoundaryTag, 4> sides);

  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double x0() const { return x0_; }
  double y0() const { return y0_; }
  double cell_area() const { return dx_ * dy_; }
  double total_area() const { return cell_area() * static_cast<double>(size()); }

  std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }
  double x_center(std::size_t i) const { return x0_ + (static_cast<double>(i) + 0.5) * dx_; }
  double y_center(std::size_t j) const { return y0_ + (static_cast<double>(j) + 0.5) * dy_; }

  int region(std::size_t cell) const { return region_id_[cell]; }
  const std::vector<int>& regions() const { return region_id_; }
  /// Sorted distinct region ids.
  std::vector<int> region_ids() const;
  std::size_t region_cell_count(int id) const;
  double region_area(int id) const { return cell_area() * static_cast<double>(region_cell_count(id)); }

  /// Tag of the outer edge on `side` at position k along that side
  /// (k indexes j for Left/Right, i for Bottom/Top).
  BoundaryTag boundary(Side side, std::size_t k) const;
  void set_boundary(Side side, std::size_t k, BoundaryTag tag);
  const std::array<BoundaryTag, 4>& side_defaults() const { return sides_; }

  bool same_as(const StructuredMesh& other) const;

 private:
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  double dx_ = 1.0;
  double dy_ = 1.0;
  double x0_ = 0.0;
  double y0_ = 0.0;
  std::vector<int> region_id_;
  std::array<BoundaryTag, 4> sides_{};
  std::array<std::vector<BoundaryTag>, 4> edges_;
};

StructuredMesh build_mesh(const MeshDescription& config);

/// Convenience for tests and small problems: uniform region id everywhere.
StructuredMesh uniform_mesh(std::size_t nx, std::size_t ny, double dx, double dy, int region,
                            std::array<BoundaryTag, 4> sides);

}  // namespace romassim::fields
