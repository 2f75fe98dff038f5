#include "chmvgl/evalkit.hpp"

#include "chmvgl/parallel.hpp"
#include "chmvgl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chmvgl {

namespace {

// Upper-triangle edge indicators after relative thresholding.
std::vector<bool> binarize_edges(const Mat& laplacian, double edge_threshold) {
  const Index n = laplacian.rows();
  double max_off = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      max_off = std::max(max_off, std::abs(laplacian(i, j)));
    }
  }
  std::vector<bool> edges;
  edges.reserve(n * (n - 1) / 2);
  const double cut = edge_threshold * max_off;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      edges.push_back(max_off > 0.0 && std::abs(laplacian(i, j)) > cut);
    }
  }
  return edges;
}

}  // namespace

double f1_edges(const GraphLaplacian& truth, const GraphLaplacian& estimate,
                double edge_threshold) {
  if (truth.nodes() != estimate.nodes()) {
    throw ValidationError("f1_edges: node counts differ");
  }
  const std::vector<bool> a = binarize_edges(truth.matrix(), edge_threshold);
  const std::vector<bool> b = binarize_edges(estimate.matrix(), edge_threshold);
  int tp = 0, fp = 0, fn = 0;
  for (std::size_t e = 0; e < a.size(); ++e) {
    if (a[e] && b[e]) ++tp;
    else if (!a[e] && b[e]) ++fp;
    else if (a[e] && !b[e]) ++fn;
  }
  if (tp == 0 && fp == 0 && fn == 0) return 1.0;  // both graphs empty
  if (tp == 0) return 0.0;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

HubRanking rank_cohubs(const Mat& hub_matrix) {
  const Index n = hub_matrix.cols();
  Vec norms(n);
  for (Index j = 0; j < n; ++j) norms(j) = hub_matrix.col(j).norm();
  const double max_norm = n > 0 ? norms.maxCoeff() : 0.0;

  HubRanking ranking;
  ranking.node_order.resize(n);
  std::iota(ranking.node_order.begin(), ranking.node_order.end(), Index{0});
  std::stable_sort(ranking.node_order.begin(), ranking.node_order.end(),
                   [&](Index a, Index b) { return norms(a) > norms(b); });
  ranking.sorted_norms.reserve(n);
  for (Index node : ranking.node_order) {
    ranking.sorted_norms.push_back(max_norm > 0.0 ? norms(node) / max_norm
                                                  : 0.0);
  }
  return ranking;
}

std::set<Index> select_hubs(const HubRanking& ranking,
                            const HubSelection& mode) {
  std::set<Index> selected;
  if (mode.mode == HubSelection::Mode::kTopK) {
    if (mode.top_k < 0 ||
        mode.top_k > static_cast<int>(ranking.node_order.size())) {
      throw ValidationError("select_hubs: top_k out of range");
    }
    for (int i = 0; i < mode.top_k; ++i) {
      selected.insert(ranking.node_order[i]);
    }
  } else {
    for (std::size_t i = 0; i < ranking.node_order.size(); ++i) {
      if (ranking.sorted_norms[i] >= mode.threshold) {
        selected.insert(ranking.node_order[i]);
      }
    }
  }
  return selected;
}

double hub_recovery_f1(const std::set<Index>& true_hubs,
                       const std::set<Index>& selected) {
  if (true_hubs.empty() && selected.empty()) return 1.0;
  int tp = 0;
  for (Index u : selected) {
    if (true_hubs.count(u) > 0) ++tp;
  }
  if (tp == 0) return 0.0;
  const int fp = static_cast<int>(selected.size()) - tp;
  const int fn = static_cast<int>(true_hubs.size()) - tp;
  return 2.0 * tp / (2.0 * tp + fp + fn);
}

double selection_entropy(const std::vector<int>& frequency) {
  const double total = std::accumulate(frequency.begin(), frequency.end(), 0.0);
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (int f : frequency) {
    if (f > 0) {
      const double p = f / total;
      h -= p * std::log(p);
    }
  }
  return h;
}

ReplicabilityReport replicability(const MultiviewSignals& dataset,
                                  int subset_size, int runs, int hubs_per_run,
                                  const SolverConfig& config,
                                  std::uint64_t seed, int threads) {
  if (subset_size < 1 || subset_size > dataset.num_views()) {
    throw ValidationError("replicability: subset_size out of range");
  }
  if (runs < 1) throw ValidationError("replicability: runs must be >= 1");

  const Index n = dataset.nodes();
  std::vector<std::set<Index>> per_run(runs);
  std::vector<char> run_ok(runs, 0);

  parallel_for(static_cast<std::size_t>(runs), threads, [&](std::size_t r) {
    SplitMix64 rng(seed, r);  // stream (base_seed, run)
    std::vector<Mat> subsample;
    subsample.reserve(subset_size);
    for (int s = 0; s < subset_size; ++s) {
      subsample.push_back(
          dataset.view(static_cast<int>(rng.next_below(dataset.num_views()))));
    }
    try {
      const SolveReport fit =
          solve(sample_normalized(MultiviewSignals(std::move(subsample))),
                config);
      const HubRanking ranking = rank_cohubs(fit.decomposition.hub_matrix);
      per_run[r] = select_hubs(ranking, HubSelection::TopK(hubs_per_run));
      run_ok[r] = 1;
    } catch (const DivergenceError&) {
      run_ok[r] = 0;
    }
  });

  ReplicabilityReport report;
  report.subset_size = subset_size;
  report.frequency.assign(n, 0);
  for (int r = 0; r < runs; ++r) {
    if (!run_ok[r]) {
      ++report.skipped;
      continue;
    }
    ++report.runs;
    for (Index u : per_run[r]) ++report.frequency[u];
  }
  report.entropy = selection_entropy(report.frequency);
  return report;
}

}  // namespace chmvgl
