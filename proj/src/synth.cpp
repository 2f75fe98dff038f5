#include "chmvgl/synth.hpp"

#include "chmvgl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chmvgl {

namespace {

constexpr double kEigZeroCut = 1e-9;  // relative pseudoinverse cutoff

Mat erdos_renyi(Index n, double p, SplitMix64& rng) {
  Mat adj = Mat::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (rng.next_bernoulli(p)) {
        adj(i, j) = adj(j, i) = 1.0;
      }
    }
  }
  return adj;
}

Mat barabasi_albert(Index n, int m, SplitMix64& rng) {
  Mat adj = Mat::Zero(n, n);
  const Index seed_size = std::min<Index>(m, n);
  for (Index i = 0; i < seed_size; ++i) {
    for (Index j = i + 1; j < seed_size; ++j) {
      adj(i, j) = adj(j, i) = 1.0;
    }
  }
  // Endpoint list for degree-proportional sampling: each edge deposits
  // both endpoints.
  std::vector<Index> endpoints;
  for (Index i = 0; i < seed_size; ++i) {
    for (Index j = i + 1; j < seed_size; ++j) {
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  }
  for (Index t = seed_size; t < n; ++t) {
    std::vector<Index> targets;
    const int want = static_cast<int>(std::min<Index>(m, t));
    while (static_cast<int>(targets.size()) < want) {
      Index pick;
      if (endpoints.empty()) {
        pick = static_cast<Index>(rng.next_below(static_cast<std::uint64_t>(t)));
      } else {
        pick = endpoints[rng.next_below(endpoints.size())];
      }
      if (std::find(targets.begin(), targets.end(), pick) == targets.end()) {
        targets.push_back(pick);
      }
    }
    for (Index u : targets) {
      adj(t, u) = adj(u, t) = 1.0;
      endpoints.push_back(t);
      endpoints.push_back(u);
    }
  }
  return adj;
}

Mat random_geometric(Index n, double sigma, double cutoff, SplitMix64& rng) {
  Mat points(n, 2);
  for (Index i = 0; i < n; ++i) {
    points(i, 0) = rng.next_double();
    points(i, 1) = rng.next_double();
  }
  Mat adj = Mat::Zero(n, n);
  const double inv_s2 = 1.0 / (sigma * sigma);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const double d2 = (points.row(i) - points.row(j)).squaredNorm();
      const double w = std::exp(-d2 * inv_s2);
      if (w >= cutoff) {
        adj(i, j) = adj(j, i) = 1.0;
      }
    }
  }
  return adj;
}

}  // namespace

void GraphModelSpec::validate() const {
  if (n < 2) throw ValidationError("GraphModelSpec.n must be >= 2");
  switch (kind) {
    case GraphModel::kErdosRenyi:
      if (er_p < 0.0 || er_p > 1.0) {
        throw ValidationError("GraphModelSpec.er_p must lie in [0, 1]");
      }
      break;
    case GraphModel::kBarabasiAlbert:
      if (ba_m < 1) throw ValidationError("GraphModelSpec.ba_m must be >= 1");
      break;
    case GraphModel::kRandomGeometric:
      if (rgg_sigma <= 0.0) {
        throw ValidationError("GraphModelSpec.rgg_sigma must be > 0");
      }
      if (rgg_cutoff < 0.0 || rgg_cutoff > 1.0) {
        throw ValidationError("GraphModelSpec.rgg_cutoff must lie in [0, 1]");
      }
      break;
  }
}

void FilterSpec::validate() const {
  if (kind != FilterKind::kGaussian && alpha <= 0.0) {
    throw ValidationError("FilterSpec.alpha must be > 0 for heat/Tikhonov");
  }
}

void CoHubPlan::validate(Index n) const {
  if (bernoulli_p <= 0.0 || bernoulli_p >= 1.0) {
    throw ValidationError("CoHubPlan.bernoulli_p must lie in (0, 1)");
  }
  for (Index u : hub_indices) {
    if (u < 0 || u >= n) {
      throw ValidationError("CoHubPlan.hub_indices entry out of range: " +
                            std::to_string(u));
    }
  }
}

Mat generate_graph(const GraphModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  SplitMix64 rng(seed);
  switch (spec.kind) {
    case GraphModel::kErdosRenyi:
      return erdos_renyi(spec.n, spec.er_p, rng);
    case GraphModel::kBarabasiAlbert:
      return barabasi_albert(spec.n, spec.ba_m, rng);
    case GraphModel::kRandomGeometric:
      return random_geometric(spec.n, spec.rgg_sigma, spec.rgg_cutoff, rng);
  }
  throw ValidationError("unknown graph model");
}

CoHubInjection inject_cohubs(const std::vector<Mat>& adjacencies,
                             const CoHubPlan& plan, std::uint64_t seed) {
  if (adjacencies.empty()) throw ValidationError("need at least one view");
  const Index n = adjacencies.front().rows();
  for (const Mat& adj : adjacencies) {
    if (adj.rows() != n || adj.cols() != n) {
      throw ValidationError("adjacency views disagree on node count");
    }
  }
  plan.validate(n);

  CoHubInjection out;
  out.adjacencies = adjacencies;
  out.hub_matrix = Mat::Zero(n, n);
  if (plan.hub_indices.empty()) return out;

  std::vector<Index> hubs = plan.hub_indices;
  std::sort(hubs.begin(), hubs.end());
  hubs.erase(std::unique(hubs.begin(), hubs.end()), hubs.end());
  std::vector<bool> is_hub(n, false);
  for (Index u : hubs) is_hub[u] = true;

  const int num_views = static_cast<int>(adjacencies.size());
  SplitMix64 rng(seed);
  for (Index u : hubs) {
    for (Index j = 0; j < n; ++j) {
      if (j == u) continue;
      // Draw each unordered pair once; a hub-hub pair belongs to the
      // lower-indexed hub.
      if (is_hub[j] && j < u) continue;
      if (plan.sharing == HubSharing::kShared) {
        const double val = rng.next_bernoulli(plan.bernoulli_p) ? 1.0 : 0.0;
        for (Mat& adj : out.adjacencies) {
          adj(u, j) = adj(j, u) = val;
        }
        out.hub_matrix(j, u) = val;
        if (is_hub[j]) out.hub_matrix(u, j) = val;
      } else {
        double mean = 0.0;
        for (Mat& adj : out.adjacencies) {
          const double val = rng.next_bernoulli(plan.bernoulli_p) ? 1.0 : 0.0;
          adj(u, j) = adj(j, u) = val;
          mean += val;
        }
        mean /= num_views;
        out.hub_matrix(j, u) = mean;
        if (is_hub[j]) out.hub_matrix(u, j) = mean;
      }
    }
  }
  return out;
}

Mat apply_graph_filter(const GraphLaplacian& laplacian, const FilterSpec& spec,
                       const Mat& x0) {
  spec.validate();
  if (x0.rows() != laplacian.nodes()) {
    throw ValidationError("excitation row count does not match node count");
  }
  Eigen::SelfAdjointEigenSolver<Mat> eig(laplacian.matrix());
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed in apply_graph_filter");
  }
  const Vec& lambda = eig.eigenvalues();
  const double lambda_max = lambda.cwiseAbs().maxCoeff();
  const double zero_cut = kEigZeroCut * std::max(lambda_max, 1e-300);

  Vec h(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    const double lv = lambda(i);
    switch (spec.kind) {
      case FilterKind::kGaussian:
        if (lv <= zero_cut) {
          h(i) = 0.0;
        } else {
          h(i) = spec.gaussian_mode == GaussianMode::kLiteral
                     ? 1.0 / lv
                     : 1.0 / std::sqrt(lv);
        }
        break;
      case FilterKind::kHeat:
        h(i) = std::exp(-spec.alpha * std::max(lv, 0.0));
        break;
      case FilterKind::kTikhonov:
        h(i) = 1.0 / (1.0 + spec.alpha * std::max(lv, 0.0));
        break;
    }
  }
  return eig.eigenvectors() *
         (h.asDiagonal() * (eig.eigenvectors().transpose() * x0));
}

Mat add_noise(const Mat& signals, double eta_percent, std::uint64_t seed) {
  if (eta_percent < 0.0) {
    throw ValidationError("eta_percent must be >= 0");
  }
  const double signal_norm = signals.norm();
  if (eta_percent == 0.0 || signal_norm == 0.0) return signals;

  SplitMix64 rng(seed);
  Mat noise(signals.rows(), signals.cols());
  for (Index j = 0; j < noise.cols(); ++j) {
    for (Index i = 0; i < noise.rows(); ++i) {
      noise(i, j) = rng.next_gaussian();
    }
  }
  const double noise_norm = noise.norm();
  if (noise_norm == 0.0) return signals;
  return signals + (eta_percent / 100.0) * (signal_norm / noise_norm) * noise;
}

void DatasetSpec::validate() const {
  graph.validate();
  filter.validate();
  if (num_views < 1) throw ValidationError("DatasetSpec.num_views must be >= 1");
  if (samples_per_view < 1) {
    throw ValidationError("DatasetSpec.samples_per_view must be >= 1");
  }
  if (noise_percent < 0.0) {
    throw ValidationError("DatasetSpec.noise_percent must be >= 0");
  }
  if (num_hubs < 0 || num_hubs > graph.n) {
    throw ValidationError("DatasetSpec.num_hubs must lie in [0, n]");
  }
}

SyntheticDataset make_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  spec.validate();
  const Index n = spec.graph.n;

  // Dedicated sub-streams so changing one stage never shifts another.
  SplitMix64 hub_pick_rng(seed, 1);

  SyntheticDataset out;
  // Each view draws its own base graph; only the injected hub rows are
  // shared, which is what makes the co-hubs identifiable.
  std::vector<Mat> adjacencies;
  adjacencies.reserve(spec.num_views);
  for (int k = 0; k < spec.num_views; ++k) {
    adjacencies.push_back(generate_graph(
        spec.graph, SplitMix64(seed, 100 + static_cast<std::uint64_t>(k))
                        .next_u64()));
  }

  CoHubPlan plan = spec.cohubs;
  if (plan.hub_indices.empty() && spec.num_hubs > 0) {
    // Sample distinct hubs uniformly.
    std::vector<Index> all(n);
    std::iota(all.begin(), all.end(), Index{0});
    for (int h = 0; h < spec.num_hubs; ++h) {
      const std::size_t pick = h + hub_pick_rng.next_below(all.size() - h);
      std::swap(all[h], all[pick]);
    }
    plan.hub_indices.assign(all.begin(), all.begin() + spec.num_hubs);
    std::sort(plan.hub_indices.begin(), plan.hub_indices.end());
  }

  CoHubInjection injected =
      inject_cohubs(adjacencies, plan, SplitMix64(seed, 2).next_u64());
  out.adjacencies = std::move(injected.adjacencies);
  out.hub_matrix = std::move(injected.hub_matrix);
  out.hub_indices = plan.hub_indices;

  out.signals.reserve(spec.num_views);
  for (int k = 0; k < spec.num_views; ++k) {
    const GraphLaplacian lap = laplacian_from_adjacency(out.adjacencies[k]);
    SplitMix64 x0_rng(seed, 3 + 2 * static_cast<std::uint64_t>(k));
    Mat x0(n, spec.samples_per_view);
    for (Index j = 0; j < x0.cols(); ++j) {
      for (Index i = 0; i < n; ++i) {
        x0(i, j) = x0_rng.next_gaussian();
      }
    }
    Mat x = apply_graph_filter(lap, spec.filter, x0);
    x = add_noise(x, spec.noise_percent,
                  SplitMix64(seed, 4 + 2 * static_cast<std::uint64_t>(k)).next_u64());
    out.signals.push_back(std::move(x));
  }
  return out;
}

}  // namespace chmvgl
