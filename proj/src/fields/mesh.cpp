#include "romassim/fields/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "romassim/error.hpp"

namespace romassim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroDimension: return "ZeroDimension";
    case ErrorCode::RegionGap: return "RegionGap";
    case ErrorCode::MeshMismatch: return "MeshMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeCoefficient: return "NegativeCoefficient";
    case ErrorCode::NoFission: return "NoFission";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::ExtrapolationRequest: return "ExtrapolationRequest";
    case ErrorCode::EmptyLibrary: return "EmptyLibrary";
    case ErrorCode::LibraryExhausted: return "LibraryExhausted";
    case ErrorCode::DegenerateSnapshot: return "DegenerateSnapshot";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::StalledSelection: return "StalledSelection";
    case ErrorCode::SingularSaddle: return "SingularSaddle";
    case ErrorCode::EmptyValidation: return "EmptyValidation";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace romassim

namespace romassim::fields {

BoundaryTag parse_boundary_tag(const std::string& name) {
  if (name == "vacuum" || name == "Vacuum") return BoundaryTag::Vacuum;
  if (name == "symmetry" || name == "Symmetry") return BoundaryTag::Symmetry;
  if (name == "fixed_temperature" || name == "FixedTemperature") return BoundaryTag::FixedTemperature;
  throw Error(ErrorCode::Config, "unknown boundary tag '" + name + "'");
}

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Vacuum: return "vacuum";
    case BoundaryTag::Symmetry: return "symmetry";
    case BoundaryTag::FixedTemperature: return "fixed_temperature";
  }
  return "symmetry";
}

RegionMask parse_region_mask(const std::string& text) {
  RegionMask mask;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream row(line);
    std::vector<int> values;
    int v = 0;
    while (row >> v) values.push_back(v);
    if (!row.eof()) throw Error(ErrorCode::Io, "non-integer token in region mask");
    if (values.empty()) continue;
    if (mask.nx == 0) mask.nx = values.size();
    if (values.size() != mask.nx) throw Error(ErrorCode::Io, "ragged region mask row");
    mask.ids.insert(mask.ids.end(), values.begin(), values.end());
    ++mask.ny;
  }
  return mask;
}

RegionMask read_region_mask(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open region mask " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_region_mask(buffer.str());
}

void write_region_mask(const std::filesystem::path& path, const RegionMask& mask) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write region mask " + path.string());
  for (std::size_t j = 0; j < mask.ny; ++j) {
    for (std::size_t i = 0; i < mask.nx; ++i) {
      if (i) out << ' ';
      out << mask.at(i, j);
    }
    out << '\n';
  }
}

StructuredMesh::StructuredMesh(std::size_t nx, std::size_t ny, double dx, double dy, double x0,
                               double y0, std::vector<int> region_id,
                               std::array<BoundaryTag, 4> sides)
    : nx_(nx), ny_(ny), dx_(dx), dy_(dy), x0_(x0), y0_(y0), region_id_(std::move(region_id)),
      sides_(sides) {
  if (nx_ == 0 || ny_ == 0) throw Error(ErrorCode::ZeroDimension, "mesh has no cells");
  if (!(dx_ > 0.0) || !(dy_ > 0.0)) throw Error(ErrorCode::InvalidArgument, "cell sizes must be positive");
  if (region_id_.size() != nx_ * ny_) throw Error(ErrorCode::RegionGap, "region map does not cover the mesh");
  for (int id : region_id_)
    if (id <= 0) throw Error(ErrorCode::RegionGap, "cell without a region id");
  edges_[0].assign(ny_, sides_[0]);
  edges_[1].assign(ny_, sides_[1]);
  edges_[2].assign(nx_, sides_[2]);
  edges_[3].assign(nx_, sides_[3]);
}

std::vector<int> StructuredMesh::region_ids() const {
  std::set<int> ids(region_id_.begin(), region_id_.end());
  return {ids.begin(), ids.end()};
}

std::size_t StructuredMesh::region_cell_count(int id) const {
  return static_cast<std::size_t>(std::count(region_id_.begin(), region_id_.end(), id));
}

BoundaryTag StructuredMesh::boundary(Side side, std::size_t k) const {
  return edges_[static_cast<std::size_t>(side)].at(k);
}

void StructuredMesh::set_boundary(Side side, std::size_t k, BoundaryTag tag) {
  edges_[static_cast<std::size_t>(side)].at(k) = tag;
}

bool StructuredMesh::same_as(const StructuredMesh& other) const {
  if (this == &other) return true;
  return nx_ == other.nx_ && ny_ == other.ny_ && dx_ == other.dx_ && dy_ == other.dy_ &&
         x0_ == other.x0_ && y0_ == other.y0_;
}

StructuredMesh build_mesh(const MeshDescription& config) {
  const auto& mask = config.mask;
  const std::size_t r = config.refine;
  if (mask.nx * mask.ny * r == 0) throw Error(ErrorCode::ZeroDimension, "mesh description has no cells");
  if (mask.ids.size() != mask.nx * mask.ny) throw Error(ErrorCode::RegionGap, "mask size does not match its dimensions");
  const std::size_t nx = mask.nx * r;
  const std::size_t ny = mask.ny * r;
  std::vector<int> ids(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) ids[j * nx + i] = mask.at(i / r, j / r);
  return StructuredMesh(nx, ny, config.mask_dx / static_cast<double>(r),
                        config.mask_dy / static_cast<double>(r), config.x0, config.y0, std::move(ids),
                        config.sides);
}

StructuredMesh uniform_mesh(std::size_t nx, std::size_t ny, double dx, double dy, int region,
                            std::array<BoundaryTag, 4> sides) {
  return StructuredMesh(nx, ny, dx, dy, 0.0, 0.0, std::vector<int>(nx * ny, region), sides);
}

}  // namespace romassim::fields
