#include "chmvgl/model_select.hpp"

#include "chmvgl/parallel.hpp"

#include <cmath>
#include <limits>

namespace chmvgl {

double log_pseudo_det(const GraphLaplacian& laplacian) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(laplacian.matrix(),
                                         Eigen::EigenvaluesOnly);
  const Vec& lambda = eig.eigenvalues();
  const double lambda_max = lambda.maxCoeff();
  if (lambda_max <= 0.0) return 0.0;
  const double cut = 1e-9 * lambda_max;
  double sum = 0.0;
  for (Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > cut) sum += std::log(lambda(i));
  }
  return sum;
}

double view_nll(const GraphLaplacian& laplacian, const Mat& signals,
                bool sign_corrected) {
  const double d = static_cast<double>(signals.cols());
  const double logdet = log_pseudo_det(laplacian);
  const double data = total_variation(laplacian, signals);
  return 0.5 * ((sign_corrected ? -d : d) * logdet + data);
}

int count_hub_df(const Mat& hub_matrix, double column_tol) {
  if (column_tol < 0) throw ValidationError("column_tol must be >= 0");
  Vec norms(hub_matrix.cols());
  for (Index j = 0; j < hub_matrix.cols(); ++j) {
    norms(j) = hub_matrix.col(j).norm();
  }
  const double max_norm = norms.size() > 0 ? norms.maxCoeff() : 0.0;
  if (max_norm == 0.0) return 0;
  return static_cast<int>((norms.array() > column_tol * max_norm).count());
}

BicResult bic_score(const CoHubDecomposition& decomposition,
                    const MultiviewSignals& signals, double column_tol) {
  const int views = decomposition.num_views();
  if (views != signals.num_views()) {
    throw ValidationError("decomposition and signals disagree on view count");
  }
  const double n = static_cast<double>(signals.nodes());

  BicResult result;
  double loglik = 0.0;
  double total_obs = 0.0;
  for (int k = 0; k < views; ++k) {
    const double nll = view_nll(decomposition.laplacians[k], signals.view(k));
    result.per_view_nll.push_back(nll);
    loglik += nll;
    total_obs += static_cast<double>(signals.samples(k)) * n;
  }
  result.df_star = count_hub_df(decomposition.hub_matrix, column_tol);
  result.df = views * n * (n - 1.0) / 2.0 + result.df_star;
  result.loglik_term = 2.0 * loglik;
  result.score = result.loglik_term + std::log(total_obs) * result.df;
  return result;
}

GridSearchResult grid_search(const MultiviewSignals& signals,
                             const std::vector<GammaTuple>& grid,
                             const SolverConfig& config, int threads) {
  if (grid.empty()) throw ValidationError("grid_search needs a nonempty grid");

  const MultiviewSignals normalized = sample_normalized(signals);
  GridSearchResult result;
  result.table.resize(grid.size());

  parallel_for(grid.size(), threads, [&](std::size_t i) {
    SolverConfig point = config;
    point.gamma1 = grid[i][0];
    point.gamma2 = grid[i][1];
    point.gamma3 = grid[i][2];
    point.gamma4 = grid[i][3];
    BicResult row;
    row.gamma = grid[i];
    try {
      const SolveReport fit = solve(normalized, point);
      row = bic_score(fit.decomposition, signals);
      row.gamma = grid[i];
      row.converged = fit.converged;
    } catch (const DivergenceError&) {
      row.diverged = true;
      row.score = std::numeric_limits<double>::quiet_NaN();
    }
    result.table[i] = std::move(row);
  });

  // Argmin with deterministic tie-break: smallest score, then
  // lexicographically smallest gamma.
  bool found = false;
  for (std::size_t i = 0; i < result.table.size(); ++i) {
    const BicResult& row = result.table[i];
    if (row.diverged || !std::isfinite(row.score)) continue;
    if (!found) {
      result.best_index = i;
      found = true;
      continue;
    }
    const BicResult& best = result.table[result.best_index];
    if (row.score < best.score ||
        (row.score == best.score && row.gamma < best.gamma)) {
      result.best_index = i;
    }
  }
  if (!found) {
    throw DivergenceError(0, config.alpha0);
  }
  return result;
}

std::vector<GammaTuple> default_gamma_grid() {
  const std::array<double, 3> g1{1e-2, 1e-1, 1.0};
  const std::array<double, 3> g2{1e-1, 1.0, 10.0};
  const std::array<double, 3> g3{1e-2, 1e-1, 1.0};
  const std::array<double, 3> g4{1e-2, 1e-1, 1.0};
  std::vector<GammaTuple> grid;
  grid.reserve(81);
  for (double a : g1)
    for (double b : g2)
      for (double c : g3)
        for (double d : g4) grid.push_back({a, b, c, d});
  return grid;
}

}  // namespace chmvgl
