#pragma once

#include "chmvgl/graph.hpp"
#include "chmvgl/solver.hpp"

#include <cstdint>
#include <set>
#include <vector>

namespace chmvgl {

// Column norms of V normalized by the largest, sorted descending with
// ties broken by node index.
struct HubRanking {
  std::vector<double> sorted_norms;
  std::vector<Index> node_order;
};

struct ReplicabilityReport {
  std::vector<int> frequency;  // per-node selection counts
  double entropy = 0.0;        // natural log
  int runs = 0;                // completed resamples
  int skipped = 0;             // resamples lost to solver divergence
  int subset_size = 0;
};

// Edge-recovery F1 after binarizing both Laplacians at
// |L_ij| > edge_threshold * max|offdiag| on the upper triangle.
// Two empty edge sets score 1; exactly one empty scores 0.
double f1_edges(const GraphLaplacian& truth, const GraphLaplacian& estimate,
                double edge_threshold = kDefaultEdgeThreshold);

HubRanking rank_cohubs(const Mat& hub_matrix);

struct HubSelection {
  enum class Mode { kTopK, kThreshold };
  Mode mode = Mode::kTopK;
  int top_k = 0;
  double threshold = 0.5;

  static HubSelection TopK(int k) { return {Mode::kTopK, k, 0.0}; }
  static HubSelection Threshold(double t) { return {Mode::kThreshold, 0, t}; }
};

// Top-k takes the first k ranked nodes; threshold keeps every node whose
// normalized norm is >= the threshold.
std::set<Index> select_hubs(const HubRanking& ranking,
                            const HubSelection& mode);

// Set-F1 between planted and selected hub sets (both empty -> 1).
double hub_recovery_f1(const std::set<Index>& true_hubs,
                       const std::set<Index>& selected);

// Shannon entropy (natural log) of a selection-frequency histogram,
// with 0 log 0 = 0.
double selection_entropy(const std::vector<int>& frequency);

// Resampling replicability: each run draws subset_size views with
// replacement, solves, and tallies the top hubs_per_run ranked hubs.
// Runs execute in parallel on per-run RNG streams with deterministic
// aggregation; divergent runs are skipped and counted.
ReplicabilityReport replicability(const MultiviewSignals& dataset,
                                  int subset_size, int runs, int hubs_per_run,
                                  const SolverConfig& config,
                                  std::uint64_t seed, int threads = 1);

}  // namespace chmvgl
