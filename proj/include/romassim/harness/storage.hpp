#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "romassim/fields/field.hpp"
#include "romassim/geim/geim.hpp"
#include "romassim/pbdw/pbdw.hpp"
#include "romassim/reduction/snapshots.hpp"

namespace romassim::harness {

/// 17 significant digits, '.' decimal point, locale independent.
std::string format_double(double v);

/// Comma-separated table with a header row.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

nlohmann::json mesh_to_json(const fields::StructuredMesh& mesh);
fields::MeshPtr mesh_from_json(const nlohmann::json& j);

/// Raw little-endian float64 array.
void write_f64(const std::filesystem::path& path, const Eigen::VectorXd& values);
Eigen::VectorXd read_f64(const std::filesystem::path& path, std::size_t expected_size);

struct SnapshotManifest {
  std::string benchmark;
  std::string label;  // e.g. "train", "truth"
  std::uint64_t seed = 0;
};

/// Directory container: manifest.json plus snap_<i>_<field>.f64.
void write_snapshots(const std::filesystem::path& dir, const reduction::SnapshotSet& set,
                     const SnapshotManifest& manifest);
reduction::SnapshotSet read_snapshots(const std::filesystem::path& dir, SnapshotManifest* manifest = nullptr);

/// GEIM model directory: model.json plus magic_<m>.f64.
void write_geim_model(const std::filesystem::path& dir, const geim::GeimModel& model, const std::string& field,
                      double sigma);
geim::GeimModel read_geim_model(const std::filesystem::path& dir, std::string* field = nullptr,
                                double* sigma = nullptr);

/// PBDW model directory: model.json plus zeta_<n>.f64. A and K are rebuilt on load.
void write_pbdw_model(const std::filesystem::path& dir, const pbdw::PbdwModel& model, const std::string& field,
                      double sigma);
pbdw::PbdwModel read_pbdw_model(const std::filesystem::path& dir, std::string* field = nullptr,
                                double* sigma = nullptr);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace romassim::harness
