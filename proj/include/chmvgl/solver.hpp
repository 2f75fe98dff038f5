#pragma once

#include "chmvgl/graph.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace chmvgl {

enum class AlphaSchedule { kFixed, kGrowing };
enum class InitMode { kZeros, kRandom };

struct SolverConfig {
  // Regularization weights: gamma1 off-diagonal sparsity, gamma2 degree
  // log-barrier, gamma3 column-sparse hub penalty, gamma4 view-specific
  // shrinkage. These are consumed as-is; sweep harnesses pass
  // sample-normalized signals so configured values stay per-sample units.
  double gamma1 = 0.1;
  double gamma2 = 1.0;
  double gamma3 = 0.1;
  double gamma4 = 0.1;

  double alpha0 = 1.0;  // initial penalty
  double mu = 1.01;     // penalty growth factor (> 1 when growing)
  AlphaSchedule alpha_schedule = AlphaSchedule::kGrowing;
  double alpha_cap = 1e4;

  int max_iter = 500;
  double tol = 1e-4;  // max normalized primal residual

  InitMode init = InitMode::kZeros;
  std::uint64_t init_seed = 0;

  // Record residuals of the running ergodic averages each iteration
  // (the quantity with the proven O(1/t) rate).
  bool track_ergodic = false;

  void validate() const;  // throws ValidationError
};

// All primal variables, dual multipliers, and the penalty of the
// four-block splitting. PEPt / PXiPt cache the conjugated copies of
// E / Xi; the first-block update refreshes them, and tests that write
// E or Xi by hand must call sync_lifts().
struct AdmmState {
  ProjectionBasis basis;

  // Per-view primals.
  std::vector<Mat> E, Xi;               // (n-1) x (n-1)
  std::vector<Mat> Z, Gamma, C, Psi;    // n x n; Z diagonal, positive
  // Shared primals.
  Mat V, W, G;

  // Dual multipliers, one family per constraint of the splitting.
  std::vector<Mat> Y;  // C^k = P E^k P^T
  std::vector<Mat> J;  // Z^k = I .* C^k
  std::vector<Mat> T;  // Gamma^k = P Xi^k P^T
  std::vector<Mat> M;  // C^k - Gamma^k = V + W
  std::vector<Mat> R;  // Psi^k = P E^k P^T - Z^k
  Mat N;               // V = W^T
  Mat Q;               // G = V

  std::vector<Mat> PEPt, PXiPt;

  double alpha = 1.0;
  int iter = 0;

  static AdmmState zeros(ProjectionBasis basis, int num_views);

  Index nodes() const { return basis.nodes(); }
  int num_views() const { return static_cast<int>(E.size()); }

  void sync_lifts();
  bool all_finite() const;
};

// Normalized Frobenius norms of the splitting constraints, one entry per
// constraint: for each view [C - PEP^T, Z - I.*C, Gamma - PXiP^T,
// C - Gamma - V - W, Psi - PEP^T + Z], then the shared [G - V, V - W^T];
// 5K + 2 values. Each is scaled by max(1, operand norms).
struct ResidualReport {
  std::vector<double> values;
  double max_value = 0.0;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int iteration, double alpha);
  int iteration;
  double alpha;
};

// B^k = P^T X^k X^k^T P, the data term seen by the E-updates.
std::vector<Mat> precompute_data_terms(const MultiviewSignals& signals,
                                       const ProjectionBasis& basis);

// Block 1: exact minimizers for E^k, Xi^k, and V.
void update_first_block(AdmmState& state, const std::vector<Mat>& data_terms,
                        const SolverConfig& config);

// Block 2: Z^k from the positive root of its scalar quadratic, Gamma^k
// in closed form.
void update_second_block(AdmmState& state, const SolverConfig& config);

// Block 3: C^k and Psi^k. The diagonal of C sees one extra quadratic
// (the Z = I .* C coupling), so its normalizer differs from the
// off-diagonal one.
void update_third_block(AdmmState& state, const SolverConfig& config);

// Column-wise block soft-threshold: column j scaled by
// max(0, 1 - tau / ||M_j||_2).
Mat prox_l21(const Mat& m, double tau);

// Block 4: G via the l2,1 proximal map, W in closed form.
void update_fourth_block(AdmmState& state, const SolverConfig& config);

// Dual ascent on all seven multiplier families; grows alpha by mu up to
// alpha_cap under the growing schedule.
void update_multipliers(AdmmState& state, const SolverConfig& config);

ResidualReport compute_residuals(const AdmmState& state);

// Largest penalty with the proven sublinear ergodic rate:
// min{ gamma2 / (6 M^2), 2 gamma1 / 15, 2 gamma4 / (5 (K + 2)) },
// where M bounds the Laplacian diagonals.
double alpha_upper_bound(double gamma1, double gamma2, double gamma4,
                         int num_views, double diag_bound);

struct SolveReport {
  CoHubDecomposition decomposition;
  int iterations = 0;
  bool converged = false;
  double final_alpha = 0.0;
  // Per-iteration traces; residual_history rows follow the
  // ResidualReport layout.
  std::vector<std::vector<double>> residual_history;
  std::vector<double> max_residual_history;
  std::vector<double> objective_history;
  // Max residual of the running ergodic averages; filled only when
  // config.track_ergodic is set.
  std::vector<double> ergodic_residual_history;
};

// Runs blocks 1-4 plus dual ascent until the max normalized residual
// drops below tol or max_iter is hit. Returns L^k repaired from C^k,
// S^k read from Gamma^k (symmetrized, row sums re-zeroed), V = G.
// Throws DivergenceError when the state stops being finite.
SolveReport solve(const MultiviewSignals& signals, const SolverConfig& config);

// Divides each view by sqrt(d_k) so the solver's data term becomes the
// sample covariance; keeps configured gammas in per-sample units that
// stay comparable across sample counts.
MultiviewSignals sample_normalized(const MultiviewSignals& signals);

// ---- Single-view baseline -------------------------------------------------

struct SingleViewOptions {
  double alpha_sv = 0.5;   // density weight on ||L||_F^2
  int max_iter = 5000;
  double kkt_tol = 1e-5;
};

struct SingleViewReport {
  GraphLaplacian laplacian;
  bool converged = false;
  int iterations = 0;
  double kkt_residual = 0.0;
};

// Smoothness-based single-view learning: minimize
// tr(X^T L X) + alpha_sv ||L||_F^2 over valid Laplacians with
// tr(L) = 2n, solved by accelerated projected gradient on the
// nonnegative edge weights (simplex constraint sum w = n).
SingleViewReport solve_single_view(const Mat& signals,
                                   const SingleViewOptions& options = {});

}  // namespace chmvgl
