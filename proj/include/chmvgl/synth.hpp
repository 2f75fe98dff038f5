#pragma once

#include "chmvgl/graph.hpp"

#include <cstdint>
#include <vector>

namespace chmvgl {

enum class GraphModel { kErdosRenyi, kBarabasiAlbert, kRandomGeometric };

struct GraphModelSpec {
  GraphModel kind = GraphModel::kErdosRenyi;
  Index n = 32;
  double er_p = 0.1;        // ER edge probability
  int ba_m = 2;             // BA attachment count
  double rgg_sigma = 0.25;  // RGG kernel width
  double rgg_cutoff = 0.6;  // RGG weight cutoff before binarization

  void validate() const;  // throws ValidationError naming the field
};

enum class FilterKind { kGaussian, kHeat, kTikhonov };
enum class GaussianMode { kLiteral, kSqrt };

struct FilterSpec {
  FilterKind kind = FilterKind::kHeat;
  double alpha = 5.0;  // heat / Tikhonov parameter
  GaussianMode gaussian_mode = GaussianMode::kLiteral;

  void validate() const;
};

enum class HubSharing { kShared, kIndependent };

struct CoHubPlan {
  std::vector<Index> hub_indices;
  double bernoulli_p = 0.3;
  HubSharing sharing = HubSharing::kShared;

  void validate(Index n) const;
};

// Symmetric binary adjacency with zero diagonal; deterministic per seed.
Mat generate_graph(const GraphModelSpec& spec, std::uint64_t seed);

struct CoHubInjection {
  std::vector<Mat> adjacencies;
  // Ground-truth hub matrix: column u of a hub node u carries its drawn
  // connections. Shared mode writes the single draw; independent mode
  // stores the per-pair mean across views (column support is identical).
  Mat hub_matrix;
};

// Replaces the row/column of each planned hub node with Bernoulli(p)
// draws, one draw per unordered pair. Shared mode writes the same draw
// into every view; independent mode redraws per view.
CoHubInjection inject_cohubs(const std::vector<Mat>& adjacencies,
                             const CoHubPlan& plan, std::uint64_t seed);

// Applies the spectral filter h(L) to the columns of x0 through the
// symmetric eigendecomposition of L. Eigenvalues below 1e-9 * lambda_max
// count as zero for the pseudoinverse modes.
Mat apply_graph_filter(const GraphLaplacian& laplacian, const FilterSpec& spec,
                       const Mat& x0);

// X + (eta/100) * ||X||_F * E / ||E||_F with E standard Gaussian, so the
// relative noise level in Frobenius norm is exactly eta percent.
Mat add_noise(const Mat& signals, double eta_percent, std::uint64_t seed);

// One full synthetic multiview dataset per the benchmark protocol.
struct DatasetSpec {
  GraphModelSpec graph;
  FilterSpec filter;
  CoHubPlan cohubs;  // hub_indices chosen by the generator when empty
  int num_hubs = 1;  // used when cohubs.hub_indices is empty
  int num_views = 3;
  Index samples_per_view = 500;
  double noise_percent = 10.0;

  void validate() const;
};

struct SyntheticDataset {
  std::vector<Mat> adjacencies;   // ground-truth per view
  std::vector<Mat> signals;       // n x d per view
  std::vector<Index> hub_indices; // planted co-hubs
  Mat hub_matrix;                 // ground-truth V
};

// Draws the base graph, clones it per view, injects co-hubs, filters
// standard-normal excitations, and adds noise. Realization r of a sweep
// should pass stream-split seeds derived from (base_seed, r).
SyntheticDataset make_dataset(const DatasetSpec& spec, std::uint64_t seed);

}  // namespace chmvgl
