#pragma once

// Config-driven experiment machinery shared by the CLI and the test
// suites: JSON config parsing, dataset synthesis from a config, the
// single-view comparator with its selection rule, and the benchmark
// sweeps.

#include "chmvgl/evalkit.hpp"
#include "chmvgl/graph.hpp"
#include "chmvgl/io.hpp"
#include "chmvgl/model_select.hpp"
#include "chmvgl/solver.hpp"
#include "chmvgl/synth.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chmvgl {

// ---- Config parsing ---------------------------------------------------

// Missing keys keep their defaults; unknown keys are rejected so typos
// fail loudly (exit code 1 paths in the CLI).
DatasetSpec dataset_spec_from_json(const json& section);
SolverConfig solver_config_from_json(const json& section);
std::vector<GammaTuple> grid_from_json(const json& section);

json dataset_spec_to_json(const DatasetSpec& spec);
json solver_config_to_json(const SolverConfig& config);

// Output binarization threshold for learned edge lists; lives beside the
// solver section in configs.
double edge_threshold_from_json(const json& section);

// ---- Single-view comparator --------------------------------------------

// Learns one view per sample count with alpha_sv selected from a small
// grid by the per-view negative log-likelihood (the same scoring family
// the BIC sweep uses), so both methods get the same tuning protocol.
struct TunedSingleView {
  GraphLaplacian laplacian;
  double alpha_sv = 0.0;
};
TunedSingleView learn_single_view_tuned(const Mat& raw_view);

// ---- Benchmark suites ----------------------------------------------------

struct SweepRow {
  std::string axis;    // "K", "h", "eta", "model_filter", "n"
  std::string label;   // value on the axis
  std::string method;  // "CH-MVGL" or "SV"
  double mean = 0.0;
  double stddev = 0.0;
};

struct BenchmarkOptions {
  int realizations = 10;
  int threads = 1;
  std::uint64_t seed = 1;
  // Compact per-cell BIC grid for the joint method; selected once per
  // sweep cell on the first realization, reused for the rest.
  std::vector<GammaTuple> gamma_grid;
  SolverConfig solver;  // non-gamma fields
  DatasetSpec base;     // overridden along the sweep axis

  BenchmarkOptions();
};

std::vector<SweepRow> benchmark_views(const BenchmarkOptions& options,
                                      const std::vector<int>& k_values);
std::vector<SweepRow> benchmark_hubs(const BenchmarkOptions& options,
                                     const std::vector<int>& hub_counts);
std::vector<SweepRow> benchmark_noise(const BenchmarkOptions& options,
                                      const std::vector<double>& eta_values);
std::vector<SweepRow> benchmark_models(const BenchmarkOptions& options);

struct ScalabilityRow {
  std::string axis;  // "n" or "K"
  double value = 0.0;
  std::string method;
  double seconds_per_iter = 0.0;
};
std::vector<ScalabilityRow> benchmark_scalability(
    const BenchmarkOptions& options, const std::vector<Index>& n_values,
    const std::vector<int>& k_values);

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRow>& rows);
void write_scalability_csv(const std::filesystem::path& path,
                           const std::vector<ScalabilityRow>& rows);

// Mean edge-F1 of a fitted decomposition against ground-truth
// adjacencies.
double mean_edge_f1(const CoHubDecomposition& decomposition,
                    const std::vector<Mat>& truth_adjacencies,
                    double edge_threshold = kDefaultEdgeThreshold);

}  // namespace chmvgl
