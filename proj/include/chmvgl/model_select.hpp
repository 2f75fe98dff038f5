#pragma once

#include "chmvgl/graph.hpp"
#include "chmvgl/solver.hpp"

#include <array>
#include <vector>

namespace chmvgl {

using GammaTuple = std::array<double, 4>;

// Numerical zero for counting nonzero hub columns in ADMM output.
constexpr double kHubColumnTol = 1e-6;

struct BicResult {
  GammaTuple gamma{0, 0, 0, 0};
  double score = 0.0;        // 2 l(gamma) + log(N) * df
  double loglik_term = 0.0;  // 2 l(gamma)
  double df = 0.0;           // K n(n-1)/2 + df_star
  int df_star = 0;           // nonzero hub columns
  std::vector<double> per_view_nll;
  bool converged = false;    // solver reached tol at this grid point
  bool diverged = false;     // solver blew up; score is not meaningful
};

// Sum of log eigenvalues above 1e-9 * lambda_max; empty sum is 0.
double log_pseudo_det(const GraphLaplacian& laplacian);

// Per-view term (1/2) [ d logdet+(L) + tr(X^T L X) ], as printed.
// sign_corrected flips the logdet sign to the Gaussian convention.
double view_nll(const GraphLaplacian& laplacian, const Mat& signals,
                bool sign_corrected = false);

// Number of columns of V with norm above column_tol * max column norm.
int count_hub_df(const Mat& hub_matrix, double column_tol = kHubColumnTol);

// Assembles the BIC score of a fitted decomposition against the raw
// signals: N = sum_k d_k * n.
BicResult bic_score(const CoHubDecomposition& decomposition,
                    const MultiviewSignals& signals,
                    double column_tol = kHubColumnTol);

struct GridSearchResult {
  std::vector<BicResult> table;  // input grid order
  std::size_t best_index = 0;
  const BicResult& best() const { return table[best_index]; }
};

// Solves once per grid point (on sample-normalized signals, so grid
// values are per-sample units) and scores each fit. Divergent points
// become flagged rows; ties break toward the lexicographically smallest
// gamma. Grid points are independent and run on `threads` workers with
// deterministic output order.
GridSearchResult grid_search(const MultiviewSignals& signals,
                             const std::vector<GammaTuple>& grid,
                             const SolverConfig& config, int threads = 1);

// Log-spaced default grid: gamma1, gamma3, gamma4 in {1e-2, 1e-1, 1},
// gamma2 in {1e-1, 1, 10}; 81 points.
std::vector<GammaTuple> default_gamma_grid();

}  // namespace chmvgl
