#pragma once

#include "chmvgl/graph.hpp"

#include <json.hpp>  // single-header nlohmann/json from vendor/

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace chmvgl {

using json = nlohmann::ordered_json;  // stable key order in emitted files

/// Thrown on unreadable/unwritable paths or malformed files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Matrix CSV: plain comma-separated values, no header, row-major, full
// precision (17 significant digits).
void write_matrix_csv(const std::filesystem::path& path, const Mat& matrix);
Mat read_matrix_csv(const std::filesystem::path& path);

// Edge list CSV: one `i,j,weight` row per nonzero upper-triangle entry
// of a nonnegative adjacency matrix, i < j.
void write_edge_list_csv(const std::filesystem::path& path,
                         const Mat& adjacency);
Mat read_edge_list_csv(const std::filesystem::path& path, Index n);

struct DatasetManifest {
  Index n = 0;
  int num_views = 0;
  std::vector<std::string> view_files;   // relative to the manifest
  std::vector<Index> samples;            // d_k per view
  std::vector<std::string> truth_files;  // empty when no ground truth
  std::vector<Index> hub_indices;
  bool has_truth = false;
  std::uint64_t seed = 0;
  json generator_echo;  // generator section of the config, if any
};

void write_manifest(const std::filesystem::path& path,
                    const DatasetManifest& manifest);

// Loads and verifies: referenced files must exist and parse to the
// declared shapes.
DatasetManifest load_manifest(const std::filesystem::path& path);

// Signals referenced by a manifest, in view order.
MultiviewSignals load_signals(const std::filesystem::path& manifest_path,
                              const DatasetManifest& manifest);

void write_json(const std::filesystem::path& path, const json& value);
json read_json(const std::filesystem::path& path);

}  // namespace chmvgl
