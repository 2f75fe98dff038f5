#include "chmvgl/solver.hpp"

#include "chmvgl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <memory>
#include <numeric>
#include <utility>

namespace chmvgl {

namespace {

double operand_scale(std::initializer_list<double> norms) {
  double scale = 1.0;
  for (double v : norms) scale = std::max(scale, v);
  return scale;
}

Mat random_symmetric(Index n, double scale, SplitMix64& rng) {
  Mat a(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      a(i, j) = rng.next_gaussian();
    }
  }
  return scale * 0.5 * (a + a.transpose());
}

// Objective of the splitting at the current iterate (the function whose
// ergodic averages carry the O(1/t) guarantee).
double split_objective(const AdmmState& state, const std::vector<Mat>& data_terms,
                       const SolverConfig& config) {
  double value = 0.0;
  for (int k = 0; k < state.num_views(); ++k) {
    value += (data_terms[k].transpose() * state.E[k]).trace();
    value += config.gamma1 * state.Psi[k].squaredNorm();
    value -= config.gamma2 * state.Z[k].diagonal().array().log().sum();
    value += config.gamma4 * state.Xi[k].squaredNorm();
  }
  for (Index j = 0; j < state.G.cols(); ++j) {
    value += config.gamma3 * state.G.col(j).norm();
  }
  return value;
}

}  // namespace

void SolverConfig::validate() const {
  if (gamma1 < 0 || gamma3 < 0 || gamma4 < 0) {
    throw ValidationError("SolverConfig: gamma weights must be nonnegative");
  }
  if (gamma2 <= 0) {
    throw ValidationError("SolverConfig.gamma2 must be > 0 (log barrier)");
  }
  if (alpha0 <= 0) throw ValidationError("SolverConfig.alpha0 must be > 0");
  if (alpha_schedule == AlphaSchedule::kGrowing && mu <= 1.0) {
    throw ValidationError("SolverConfig.mu must be > 1 for the growing schedule");
  }
  if (alpha_cap < alpha0) {
    throw ValidationError("SolverConfig.alpha_cap must be >= alpha0");
  }
  if (max_iter < 1) throw ValidationError("SolverConfig.max_iter must be >= 1");
  if (tol <= 0) throw ValidationError("SolverConfig.tol must be > 0");
}

AdmmState AdmmState::zeros(ProjectionBasis basis, int num_views) {
  AdmmState s{std::move(basis)};
  const Index n = s.basis.nodes();
  const Index r = n - 1;
  auto zn = [&]() -> Mat { return Mat::Zero(n, n); };
  auto zr = [&]() -> Mat { return Mat::Zero(r, r); };
  for (int k = 0; k < num_views; ++k) {
    s.E.push_back(zr());
    s.Xi.push_back(zr());
    s.Z.push_back(Mat::Identity(n, n));  // interior of the log-barrier domain
    s.Gamma.push_back(zn());
    s.C.push_back(zn());
    s.Psi.push_back(zn());
    s.Y.push_back(zn());
    s.J.push_back(zn());
    s.T.push_back(zn());
    s.M.push_back(zn());
    s.R.push_back(zn());
    s.PEPt.push_back(zn());
    s.PXiPt.push_back(zn());
  }
  s.V = zn();
  s.W = zn();
  s.G = zn();
  s.N = zn();
  s.Q = zn();
  return s;
}

void AdmmState::sync_lifts() {
  for (int k = 0; k < num_views(); ++k) {
    PEPt[k] = basis.lift(E[k]);
    PXiPt[k] = basis.lift(Xi[k]);
  }
}

bool AdmmState::all_finite() const {
  auto ok = [](const Mat& m) { return m.allFinite(); };
  for (int k = 0; k < num_views(); ++k) {
    if (!ok(E[k]) || !ok(Xi[k]) || !ok(Z[k]) || !ok(Gamma[k]) || !ok(C[k]) ||
        !ok(Psi[k]) || !ok(Y[k]) || !ok(J[k]) || !ok(T[k]) || !ok(M[k]) ||
        !ok(R[k])) {
      return false;
    }
  }
  return ok(V) && ok(W) && ok(G) && ok(N) && ok(Q) && std::isfinite(alpha);
}

DivergenceError::DivergenceError(int iteration_, double alpha_)
    : std::runtime_error("solver diverged at iteration " +
                         std::to_string(iteration_) +
                         " (alpha = " + std::to_string(alpha_) + ")"),
      iteration(iteration_),
      alpha(alpha_) {}

std::vector<Mat> precompute_data_terms(const MultiviewSignals& signals,
                                       const ProjectionBasis& basis) {
  if (signals.nodes() != basis.nodes()) {
    throw ValidationError("signals and basis disagree on node count");
  }
  std::vector<Mat> data_terms;
  data_terms.reserve(signals.num_views());
  for (int k = 0; k < signals.num_views(); ++k) {
    const Mat px = basis.matrix().transpose() * signals.view(k);
    data_terms.push_back(px * px.transpose());
  }
  return data_terms;
}

void update_first_block(AdmmState& state, const std::vector<Mat>& data_terms,
                        const SolverConfig& config) {
  const double a = state.alpha;
  const int views = state.num_views();
  if (static_cast<int>(data_terms.size()) != views) {
    throw ValidationError("data term count does not match view count");
  }
  for (int k = 0; k < views; ++k) {
    // E^k: gradient of tr(B E) plus the two conjugated quadratics.
    const Mat combined =
        a * (state.C[k] + state.Psi[k] + state.Z[k]) + state.R[k] + state.Y[k];
    state.E[k] =
        (state.basis.reduce(combined) - data_terms[k].transpose()) / (2.0 * a);
    // Xi^k.
    state.Xi[k] = state.basis.reduce(a * state.Gamma[k] + state.T[k]) /
                  (2.0 * config.gamma4 + a);
  }
  // V aggregates every view plus the transpose-coupling and hub terms.
  Mat numer = a * state.W.transpose() - state.N + a * state.G + state.Q;
  for (int k = 0; k < views; ++k) {
    numer += a * (state.C[k] - state.Gamma[k] - state.W) + state.M[k];
  }
  state.V = numer / (a * (views + 2));
  state.sync_lifts();
}

void update_second_block(AdmmState& state, const SolverConfig& config) {
  const double a = state.alpha;
  for (int k = 0; k < state.num_views(); ++k) {
    // Z^k: per-diagonal positive root of 2 a z^2 - U_ii z - gamma2 = 0.
    const Vec u = a * state.C[k].diagonal() - state.J[k].diagonal() -
                  a * state.Psi[k].diagonal() + a * state.PEPt[k].diagonal() -
                  state.R[k].diagonal();
    Mat z = Mat::Zero(state.nodes(), state.nodes());
    z.diagonal() =
        (u.array() + (u.array().square() + 8.0 * a * config.gamma2).sqrt()) /
        (4.0 * a);
    state.Z[k] = std::move(z);

    state.Gamma[k] =
        (a * (state.C[k] - state.V - state.W + state.PXiPt[k]) + state.M[k] -
         state.T[k]) /
        (2.0 * a);
  }
}

void update_third_block(AdmmState& state, const SolverConfig& config) {
  const double a = state.alpha;
  for (int k = 0; k < state.num_views(); ++k) {
    const Mat numer = a * state.PEPt[k] - state.Y[k] +
                      a * (state.Gamma[k] + state.V + state.W) - state.M[k];
    Mat c = numer / (2.0 * a);
    c.diagonal() = (numer.diagonal() + a * state.Z[k].diagonal() +
                    state.J[k].diagonal()) /
                   (3.0 * a);
    state.C[k] = std::move(c);

    state.Psi[k] = (a * (state.PEPt[k] - state.Z[k]) - state.R[k]) /
                   (2.0 * config.gamma1 + a);
  }
}

Mat prox_l21(const Mat& m, double tau) {
  if (tau < 0) throw ValidationError("prox_l21 threshold must be >= 0");
  Mat out = m;
  for (Index j = 0; j < m.cols(); ++j) {
    const double norm = m.col(j).norm();
    if (norm <= tau) {
      out.col(j).setZero();
    } else {
      out.col(j) *= 1.0 - tau / norm;
    }
  }
  return out;
}

void update_fourth_block(AdmmState& state, const SolverConfig& config) {
  const double a = state.alpha;
  // Threshold gamma3 / alpha makes G the exact minimizer of
  // gamma3 ||G||_{2,1} + (alpha/2) ||G - (V - Q/alpha)||_F^2.
  state.G = prox_l21(state.V - state.Q / a, config.gamma3 / a);

  Mat numer = a * state.V.transpose() + state.N.transpose();
  for (int k = 0; k < state.num_views(); ++k) {
    numer +=
        a * (state.C[k] - state.Gamma[k] - state.V) + state.M[k];
  }
  state.W = numer / (a * (state.num_views() + 1));
}

void update_multipliers(AdmmState& state, const SolverConfig& config) {
  const double a = state.alpha;
  for (int k = 0; k < state.num_views(); ++k) {
    state.Y[k] += a * (state.C[k] - state.PEPt[k]);
    Mat diag_c = Mat::Zero(state.nodes(), state.nodes());
    diag_c.diagonal() = state.C[k].diagonal();
    state.J[k] += a * (state.Z[k] - diag_c);
    state.T[k] += a * (state.Gamma[k] - state.PXiPt[k]);
    state.M[k] += a * (state.C[k] - state.Gamma[k] - state.V - state.W);
    state.R[k] += a * (state.Psi[k] - state.PEPt[k] + state.Z[k]);
  }
  state.N += a * (state.V - state.W.transpose());
  state.Q += a * (state.G - state.V);
  if (config.alpha_schedule == AlphaSchedule::kGrowing) {
    state.alpha = std::min(config.mu * state.alpha, config.alpha_cap);
  }
}

ResidualReport compute_residuals(const AdmmState& state) {
  ResidualReport report;
  report.values.reserve(5 * state.num_views() + 2);
  auto push = [&](double norm, double scale) {
    const double v = norm / scale;
    report.values.push_back(v);
    report.max_value = std::max(report.max_value, v);
  };
  for (int k = 0; k < state.num_views(); ++k) {
    push((state.C[k] - state.PEPt[k]).norm(),
         operand_scale({state.C[k].norm(), state.PEPt[k].norm()}));
    Mat diag_c = Mat::Zero(state.nodes(), state.nodes());
    diag_c.diagonal() = state.C[k].diagonal();
    push((state.Z[k] - diag_c).norm(),
         operand_scale({state.Z[k].norm(), diag_c.norm()}));
    push((state.Gamma[k] - state.PXiPt[k]).norm(),
         operand_scale({state.Gamma[k].norm(), state.PXiPt[k].norm()}));
    push((state.C[k] - state.Gamma[k] - state.V - state.W).norm(),
         operand_scale({state.C[k].norm(), state.Gamma[k].norm(),
                        state.V.norm(), state.W.norm()}));
    push((state.Psi[k] - state.PEPt[k] + state.Z[k]).norm(),
         operand_scale(
             {state.Psi[k].norm(), state.PEPt[k].norm(), state.Z[k].norm()}));
  }
  push((state.G - state.V).norm(),
       operand_scale({state.G.norm(), state.V.norm()}));
  push((state.V - state.W.transpose()).norm(),
       operand_scale({state.V.norm(), state.W.norm()}));
  return report;
}

double alpha_upper_bound(double gamma1, double gamma2, double gamma4,
                         int num_views, double diag_bound) {
  if (gamma1 <= 0 || gamma2 <= 0 || gamma4 <= 0) {
    throw ValidationError("alpha_upper_bound needs positive gammas");
  }
  if (num_views < 1) throw ValidationError("alpha_upper_bound needs K >= 1");
  if (diag_bound <= 0) {
    throw ValidationError("alpha_upper_bound needs a positive diagonal bound");
  }
  const double sigma2 = gamma2 / (diag_bound * diag_bound);
  const double sigma3 = 2.0 * gamma1;
  const double sigma4 = 2.0 * gamma4;
  return std::min({sigma2 / 6.0, sigma3 / 15.0,
                   sigma4 / (5.0 * (num_views + 2))});
}

namespace {

// Running sums of the primal variables for ergodic-rate tracking.
struct ErgodicAccumulator {
  explicit ErgodicAccumulator(const AdmmState& state)
      : scratch(state), count(0) {
    reset_to_zero(scratch);
  }

  static void reset_to_zero(AdmmState& s) {
    for (int k = 0; k < s.num_views(); ++k) {
      s.E[k].setZero();
      s.Xi[k].setZero();
      s.Z[k].setZero();
      s.Gamma[k].setZero();
      s.C[k].setZero();
      s.Psi[k].setZero();
      s.PEPt[k].setZero();
      s.PXiPt[k].setZero();
    }
    s.V.setZero();
    s.W.setZero();
    s.G.setZero();
  }

  void add(const AdmmState& state) {
    for (int k = 0; k < state.num_views(); ++k) {
      sum_scaled(scratch.E[k], state.E[k]);
      sum_scaled(scratch.Xi[k], state.Xi[k]);
      sum_scaled(scratch.Z[k], state.Z[k]);
      sum_scaled(scratch.Gamma[k], state.Gamma[k]);
      sum_scaled(scratch.C[k], state.C[k]);
      sum_scaled(scratch.Psi[k], state.Psi[k]);
      sum_scaled(scratch.PEPt[k], state.PEPt[k]);
      sum_scaled(scratch.PXiPt[k], state.PXiPt[k]);
    }
    sum_scaled(scratch.V, state.V);
    sum_scaled(scratch.W, state.W);
    sum_scaled(scratch.G, state.G);
    ++count;
  }

  // Residual of the ergodic averages; conjugation is linear, so the
  // averaged lifts equal the lift of the averaged E / Xi.
  double residual_max() const {
    AdmmState avg = scratch;
    const double inv = 1.0 / static_cast<double>(count);
    for (int k = 0; k < avg.num_views(); ++k) {
      avg.E[k] *= inv;
      avg.Xi[k] *= inv;
      avg.Z[k] *= inv;
      avg.Gamma[k] *= inv;
      avg.C[k] *= inv;
      avg.Psi[k] *= inv;
      avg.PEPt[k] *= inv;
      avg.PXiPt[k] *= inv;
    }
    avg.V *= inv;
    avg.W *= inv;
    avg.G *= inv;
    return compute_residuals(avg).max_value;
  }

 private:
  // Incremental running sums; kept simple since the accumulator only
  // needs totals.
  static void sum_scaled(Mat& target, const Mat& value) { target += value; }

  AdmmState scratch;
  int count;
};

void random_initialize(AdmmState& state, std::uint64_t seed) {
  SplitMix64 rng(seed, 17);
  const Index n = state.nodes();
  const Index r = n - 1;
  constexpr double kScale = 0.1;
  for (int k = 0; k < state.num_views(); ++k) {
    state.E[k] = random_symmetric(r, kScale, rng);
    state.Xi[k] = random_symmetric(r, kScale, rng);
    Mat z = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      z(i, i) = 1.0 + kScale * std::abs(rng.next_gaussian());
    }
    state.Z[k] = std::move(z);
    state.Gamma[k] = random_symmetric(n, kScale, rng);
    state.C[k] = random_symmetric(n, kScale, rng);
    state.Psi[k] = random_symmetric(n, kScale, rng);
  }
  state.V = random_symmetric(n, kScale, rng);
  state.W = random_symmetric(n, kScale, rng);
  state.G = random_symmetric(n, kScale, rng);
  state.sync_lifts();
}

}  // namespace

SolveReport solve(const MultiviewSignals& signals, const SolverConfig& config) {
  config.validate();
  const Index n = signals.nodes();
  if (n < 2) throw ValidationError("solve needs at least 2 nodes");
  const int views = signals.num_views();

  ProjectionBasis basis = build_projection_basis(n);
  const std::vector<Mat> data_terms = precompute_data_terms(signals, basis);

  AdmmState state = AdmmState::zeros(std::move(basis), views);
  state.alpha = config.alpha0;
  if (config.init == InitMode::kRandom) {
    random_initialize(state, config.init_seed);
  }

  SolveReport report;
  std::unique_ptr<ErgodicAccumulator> ergodic;
  if (config.track_ergodic) {
    ergodic = std::make_unique<ErgodicAccumulator>(state);
  }

  for (int it = 0; it < config.max_iter; ++it) {
    update_first_block(state, data_terms, config);
    update_second_block(state, config);
    update_third_block(state, config);
    update_fourth_block(state, config);
    update_multipliers(state, config);
    state.iter = it + 1;

    if (!state.all_finite()) {
      throw DivergenceError(it + 1, state.alpha);
    }

    ResidualReport residuals = compute_residuals(state);
    report.max_residual_history.push_back(residuals.max_value);
    report.objective_history.push_back(
        split_objective(state, data_terms, config));
    report.residual_history.push_back(std::move(residuals.values));
    if (ergodic) {
      ergodic->add(state);
      report.ergodic_residual_history.push_back(ergodic->residual_max());
    }

    report.iterations = it + 1;
    if (report.max_residual_history.back() <= config.tol) {
      report.converged = true;
      break;
    }
  }
  report.final_alpha = state.alpha;

  // Read off the decomposition: C^k is the canonical Laplacian copy,
  // Gamma^k the view-specific part, G the hub matrix. Post-processing
  // repairs constraint round-off only (no edge thresholding here;
  // binarization belongs to evaluation).
  for (int k = 0; k < views; ++k) {
    report.decomposition.laplacians.push_back(
        postprocess_laplacian(state.C[k], 0.0));
    Mat s = 0.5 * (state.Gamma[k] + state.Gamma[k].transpose());
    s.diagonal().setZero();
    s.diagonal() = -s.rowwise().sum();
    report.decomposition.specifics.push_back(std::move(s));
  }
  report.decomposition.hub_matrix = state.G;
  return report;
}

MultiviewSignals sample_normalized(const MultiviewSignals& signals) {
  std::vector<Mat> scaled;
  scaled.reserve(signals.num_views());
  for (int k = 0; k < signals.num_views(); ++k) {
    scaled.push_back(signals.view(k) /
                     std::sqrt(static_cast<double>(signals.samples(k))));
  }
  return MultiviewSignals(std::move(scaled));
}

// ---- Single-view baseline -------------------------------------------------

namespace {

// Projection onto {w >= 0, sum w = total}.
Vec project_scaled_simplex(const Vec& v, double total) {
  const Index m = v.size();
  std::vector<double> sorted(v.data(), v.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double theta = 0.0;
  for (Index j = 0; j < m; ++j) {
    running += sorted[j];
    const double candidate = (running - total) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0);
}

}  // namespace

SingleViewReport solve_single_view(const Mat& signals,
                                   const SingleViewOptions& options) {
  const Index n = signals.rows();
  if (n < 2) throw ValidationError("solve_single_view needs at least 2 nodes");
  if (options.alpha_sv <= 0) {
    throw ValidationError("SingleViewOptions.alpha_sv must be > 0");
  }

  const Index m = n * (n - 1) / 2;
  std::vector<std::pair<Index, Index>> edges;
  edges.reserve(m);
  Vec distances(m);
  {
    Index e = 0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        edges.emplace_back(i, j);
        distances(e++) = (signals.row(i) - signals.row(j)).squaredNorm();
      }
    }
  }

  const double a = options.alpha_sv;
  const double total = static_cast<double>(n);  // tr(L) = 2n  <=>  sum w = n

  auto gradient = [&](const Vec& w) {
    Vec degree = Vec::Zero(n);
    for (Index e = 0; e < m; ++e) {
      degree(edges[e].first) += w(e);
      degree(edges[e].second) += w(e);
    }
    Vec g = distances + 4.0 * a * w;
    for (Index e = 0; e < m; ++e) {
      g(e) += 2.0 * a * (degree(edges[e].first) + degree(edges[e].second));
    }
    return g;
  };

  // Hessian is a * (4 I + 2 B^T B) with lambda_max(B^T B) <= 2(n - 1).
  const double lipschitz = 4.0 * a * static_cast<double>(n);
  const double step = 1.0 / lipschitz;

  Vec w = Vec::Constant(m, total / static_cast<double>(m));
  Vec momentum = w;
  double t_prev = 1.0;

  double kkt = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < options.max_iter; ++it) {
    const Vec w_next =
        project_scaled_simplex(momentum - step * gradient(momentum), total);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_prev * t_prev));
    momentum = w_next + ((t_prev - 1.0) / t_next) * (w_next - w);
    w = w_next;
    t_prev = t_next;

    if (it % 10 == 9 || it == options.max_iter - 1) {
      kkt = (w - project_scaled_simplex(w - gradient(w), total)).norm();
      if (kkt <= options.kkt_tol) {
        ++it;
        break;
      }
    }
  }

  Mat adjacency = Mat::Zero(n, n);
  for (Index e = 0; e < m; ++e) {
    adjacency(edges[e].first, edges[e].second) = w(e);
    adjacency(edges[e].second, edges[e].first) = w(e);
  }
  return SingleViewReport{laplacian_from_adjacency(adjacency),
                          kkt <= options.kkt_tol, it, kkt};
}

}  // namespace chmvgl
