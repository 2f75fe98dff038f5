#include "chmvgl/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace chmvgl {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  return in;
}

std::vector<double> parse_csv_row(const std::string& line,
                                  const std::filesystem::path& path) {
  std::vector<double> row;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      row.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw IoError("malformed CSV cell '" + cell + "' in " + path.string());
    }
  }
  return row;
}

}  // namespace

void write_matrix_csv(const std::filesystem::path& path, const Mat& matrix) {
  std::ofstream out = open_out(path);
  out << std::setprecision(17);
  for (Index i = 0; i < matrix.rows(); ++i) {
    for (Index j = 0; j < matrix.cols(); ++j) {
      if (j > 0) out << ',';
      out << matrix(i, j);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Mat read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_csv_row(line, path));
    if (rows.back().size() != rows.front().size()) {
      throw IoError("ragged CSV rows in " + path.string());
    }
  }
  if (rows.empty()) throw IoError("empty matrix CSV: " + path.string());
  Mat matrix(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      matrix(i, j) = rows[i][j];
    }
  }
  return matrix;
}

void write_edge_list_csv(const std::filesystem::path& path,
                         const Mat& adjacency) {
  std::ofstream out = open_out(path);
  out << std::setprecision(17);
  for (Index i = 0; i < adjacency.rows(); ++i) {
    for (Index j = i + 1; j < adjacency.cols(); ++j) {
      if (adjacency(i, j) != 0.0) {
        out << i << ',' << j << ',' << adjacency(i, j) << '\n';
      }
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Mat read_edge_list_csv(const std::filesystem::path& path, Index n) {
  std::ifstream in = open_in(path);
  Mat adjacency = Mat::Zero(n, n);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> row = parse_csv_row(line, path);
    if (row.size() != 3) {
      throw IoError("edge list rows need i,j,weight in " + path.string());
    }
    const Index i = static_cast<Index>(row[0]);
    const Index j = static_cast<Index>(row[1]);
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw IoError("edge index out of range in " + path.string());
    }
    adjacency(i, j) = adjacency(j, i) = row[2];
  }
  return adjacency;
}

void write_json(const std::filesystem::path& path, const json& value) {
  std::ofstream out = open_out(path);
  out << value.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw IoError("malformed JSON in " + path.string() + ": " + err.what());
  }
}

void write_manifest(const std::filesystem::path& path,
                    const DatasetManifest& manifest) {
  json doc;
  doc["n"] = manifest.n;
  doc["K"] = manifest.num_views;
  doc["views"] = json::array();
  for (int k = 0; k < manifest.num_views; ++k) {
    json view;
    view["file"] = manifest.view_files.at(k);
    view["d"] = manifest.samples.at(k);
    if (manifest.has_truth) view["truth"] = manifest.truth_files.at(k);
    doc["views"].push_back(view);
  }
  if (manifest.has_truth) doc["hub_indices"] = manifest.hub_indices;
  doc["seed"] = manifest.seed;
  if (!manifest.generator_echo.is_null()) {
    doc["generator"] = manifest.generator_echo;
  }
  write_json(path, doc);
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  const json doc = read_json(path);
  DatasetManifest manifest;
  try {
    manifest.n = doc.at("n").get<Index>();
    manifest.num_views = doc.at("K").get<int>();
    for (const json& view : doc.at("views")) {
      manifest.view_files.push_back(view.at("file").get<std::string>());
      manifest.samples.push_back(view.at("d").get<Index>());
      if (view.contains("truth")) {
        manifest.truth_files.push_back(view.at("truth").get<std::string>());
      }
    }
    if (doc.contains("hub_indices")) {
      manifest.hub_indices = doc.at("hub_indices").get<std::vector<Index>>();
    }
    if (doc.contains("seed")) manifest.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("generator")) manifest.generator_echo = doc.at("generator");
  } catch (const json::exception& err) {
    throw IoError("manifest " + path.string() + ": " + err.what());
  }
  manifest.has_truth =
      manifest.truth_files.size() == static_cast<std::size_t>(manifest.num_views);

  if (static_cast<int>(manifest.view_files.size()) != manifest.num_views) {
    throw IoError("manifest view count mismatch in " + path.string());
  }
  const std::filesystem::path base = path.parent_path();
  for (int k = 0; k < manifest.num_views; ++k) {
    const std::filesystem::path view_path = base / manifest.view_files[k];
    if (!std::filesystem::exists(view_path)) {
      throw IoError("manifest references missing file: " + view_path.string());
    }
  }
  return manifest;
}

MultiviewSignals load_signals(const std::filesystem::path& manifest_path,
                              const DatasetManifest& manifest) {
  const std::filesystem::path base = manifest_path.parent_path();
  std::vector<Mat> views;
  views.reserve(manifest.num_views);
  for (int k = 0; k < manifest.num_views; ++k) {
    Mat view = read_matrix_csv(base / manifest.view_files[k]);
    if (view.rows() != manifest.n || view.cols() != manifest.samples[k]) {
      throw IoError("view " + std::to_string(k) +
                    " does not match its declared shape");
    }
    views.push_back(std::move(view));
  }
  return MultiviewSignals(std::move(views));
}

}  // namespace chmvgl
