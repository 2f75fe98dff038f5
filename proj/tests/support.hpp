#pragma once

// Test-side oracles, independent of the library's implementation paths:
// finite differences, 1-D golden-section minimization, exhaustive
// enumeration, and small helpers for building random problem instances.

#include "chmvgl/graph.hpp"
#include "chmvgl/rng.hpp"
#include "chmvgl/solver.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

namespace testkit {

using chmvgl::Index;
using chmvgl::Mat;
using chmvgl::Vec;

// Central-difference gradient of a scalar function of a dense matrix.
// Central differences are exact (up to rounding) for the quadratic
// subproblems being checked.
template <typename F>
Mat fd_gradient(const F& f, const Mat& at, double h = 1e-5) {
  Mat g(at.rows(), at.cols());
  Mat x = at;
  for (Index j = 0; j < at.cols(); ++j) {
    for (Index i = 0; i < at.rows(); ++i) {
      const double step = h * (1.0 + std::abs(at(i, j)));
      x(i, j) = at(i, j) + step;
      const double fp = f(x);
      x(i, j) = at(i, j) - step;
      const double fm = f(x);
      x(i, j) = at(i, j);
      g(i, j) = (fp - fm) / (2.0 * step);
    }
  }
  return g;
}

// Same, over the diagonal only (for variables constrained diagonal).
template <typename F>
Vec fd_gradient_diagonal(const F& f, const Mat& at, double h = 1e-6) {
  Vec g(at.rows());
  Mat x = at;
  for (Index i = 0; i < at.rows(); ++i) {
    const double step = h * (1.0 + std::abs(at(i, i)));
    x(i, i) = at(i, i) + step;
    const double fp = f(x);
    x(i, i) = at(i, i) - step;
    const double fm = f(x);
    x(i, i) = at(i, i);
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

// Golden-section search for the minimizer of a unimodal function. The
// function is evaluated in long double so the localization floor
// (sqrt of the evaluation epsilon) sits well below 1e-8.
template <typename F>
long double golden_min(const F& f, long double lo, long double hi,
                       int iters = 260) {
  const long double inv_phi = (std::sqrt(5.0L) - 1.0L) / 2.0L;
  long double a = lo, b = hi;
  long double c = b - inv_phi * (b - a);
  long double d = a + inv_phi * (b - a);
  long double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5L * (a + b);
}

// Scalar objective behind one diagonal of the Z update:
// -gamma2 log z + (alpha/2)(z - a)^2 + (alpha/2)(z + b)^2.
struct ZScalarProblem {
  long double gamma2, alpha, a, b;
  long double operator()(long double z) const {
    return -gamma2 * std::log(z) + 0.5L * alpha * (z - a) * (z - a) +
           0.5L * alpha * (z + b) * (z + b);
  }
};

// Extracts the frozen scalar problem for diagonal i of view k.
inline ZScalarProblem z_scalar_problem(const chmvgl::AdmmState& frozen,
                                       const chmvgl::SolverConfig& config,
                                       int k, Index i) {
  const double alpha = frozen.alpha;
  return ZScalarProblem{
      static_cast<long double>(config.gamma2),
      static_cast<long double>(alpha),
      static_cast<long double>(frozen.C[k](i, i) - frozen.J[k](i, i) / alpha),
      static_cast<long double>(frozen.Psi[k](i, i) - frozen.PEPt[k](i, i) +
                               frozen.R[k](i, i) / alpha)};
}

inline Mat random_matrix(Index rows, Index cols, chmvgl::SplitMix64& rng,
                         double scale = 1.0) {
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      m(i, j) = scale * rng.next_gaussian();
    }
  }
  return m;
}

inline Mat random_symmetric(Index n, chmvgl::SplitMix64& rng,
                            double scale = 1.0) {
  const Mat a = random_matrix(n, n, rng, scale);
  return 0.5 * (a + a.transpose());
}

// A fully random (infeasible) ADMM state with positive Z diagonals and
// nonzero duals, for exercising the block updates away from fixed points.
inline chmvgl::AdmmState random_state(Index n, int views, std::uint64_t seed,
                                      double alpha) {
  chmvgl::AdmmState s =
      chmvgl::AdmmState::zeros(chmvgl::build_projection_basis(n), views);
  chmvgl::SplitMix64 rng(seed);
  for (int k = 0; k < views; ++k) {
    s.E[k] = random_symmetric(n - 1, rng);
    s.Xi[k] = random_symmetric(n - 1, rng);
    s.Z[k].setZero();
    for (Index i = 0; i < n; ++i) {
      s.Z[k](i, i) = 0.2 + std::abs(rng.next_gaussian());
    }
    s.Gamma[k] = random_symmetric(n, rng);
    s.C[k] = random_symmetric(n, rng);
    s.Psi[k] = random_symmetric(n, rng);
    s.Y[k] = random_symmetric(n, rng);
    s.J[k] = random_symmetric(n, rng);
    s.T[k] = random_symmetric(n, rng);
    s.M[k] = random_symmetric(n, rng);
    s.R[k] = random_symmetric(n, rng);
  }
  s.V = random_matrix(n, n, rng);
  s.W = random_matrix(n, n, rng);
  s.G = random_matrix(n, n, rng);
  s.N = random_matrix(n, n, rng);
  s.Q = random_matrix(n, n, rng);
  s.alpha = alpha;
  s.sync_lifts();
  return s;
}

// ---- Augmented-Lagrangian subproblems, written out literally ---------------
// Each returns the subproblem objective with every other variable frozen
// at the values the update step saw.

struct Subproblems {
  const chmvgl::AdmmState& frozen;  // state snapshot the update consumed
  const chmvgl::SolverConfig& config;

  double alpha() const { return frozen.alpha; }

  double for_E(int k, const Mat& b, const Mat& e) const {
    const Mat lift = frozen.basis.lift(e);
    const double a = alpha();
    return (b * e).trace() +
           0.5 * a *
               (frozen.Psi[k] - lift + frozen.Z[k] + frozen.R[k] / a)
                   .squaredNorm() +
           0.5 * a * (frozen.C[k] - lift + frozen.Y[k] / a).squaredNorm();
  }

  double for_Xi(int k, const Mat& xi) const {
    const Mat lift = frozen.basis.lift(xi);
    const double a = alpha();
    return config.gamma4 * lift.squaredNorm() +
           0.5 * a *
               (frozen.Gamma[k] - lift + frozen.T[k] / a).squaredNorm();
  }

  double for_V(const Mat& v) const {
    const double a = alpha();
    double value =
        0.5 * a * (v - frozen.W.transpose() + frozen.N / a).squaredNorm() +
        0.5 * a * (frozen.G - v + frozen.Q / a).squaredNorm();
    for (int k = 0; k < frozen.num_views(); ++k) {
      value += 0.5 * a *
               (frozen.C[k] - frozen.Gamma[k] - v - frozen.W +
                frozen.M[k] / a)
                   .squaredNorm();
    }
    return value;
  }

  double for_Z(int k, const Mat& z) const {
    const double a = alpha();
    Mat diag_c = Mat::Zero(z.rows(), z.cols());
    diag_c.diagonal() = frozen.C[k].diagonal();
    return -config.gamma2 * z.diagonal().array().log().sum() +
           0.5 * a * (z - diag_c + frozen.J[k] / a).squaredNorm() +
           0.5 * a *
               (frozen.Psi[k] - frozen.PEPt[k] + z + frozen.R[k] / a)
                   .squaredNorm();
  }

  double for_Gamma(int k, const Mat& g) const {
    const double a = alpha();
    return 0.5 * a *
               (frozen.C[k] - g - frozen.V - frozen.W + frozen.M[k] / a)
                   .squaredNorm() +
           0.5 * a * (g - frozen.PXiPt[k] + frozen.T[k] / a).squaredNorm();
  }

  double for_C(int k, const Mat& c) const {
    const double a = alpha();
    Mat diag_c = Mat::Zero(c.rows(), c.cols());
    diag_c.diagonal() = c.diagonal();
    return 0.5 * a * (c - frozen.PEPt[k] + frozen.Y[k] / a).squaredNorm() +
           0.5 * a *
               (c - frozen.Gamma[k] - frozen.V - frozen.W + frozen.M[k] / a)
                   .squaredNorm() +
           0.5 * a * (frozen.Z[k] - diag_c + frozen.J[k] / a).squaredNorm();
  }

  double for_Psi(int k, const Mat& psi) const {
    const double a = alpha();
    return config.gamma1 * psi.squaredNorm() +
           0.5 * a *
               (psi - frozen.PEPt[k] + frozen.Z[k] + frozen.R[k] / a)
                   .squaredNorm();
  }

  double for_G(const Mat& g) const {
    const double a = alpha();
    double value = 0.5 * a * (g - frozen.V + frozen.Q / a).squaredNorm();
    for (Index j = 0; j < g.cols(); ++j) {
      value += config.gamma3 * g.col(j).norm();
    }
    return value;
  }

  double for_W(const Mat& w) const {
    const double a = alpha();
    double value =
        0.5 * a * (frozen.V - w.transpose() + frozen.N / a).squaredNorm();
    for (int k = 0; k < frozen.num_views(); ++k) {
      value += 0.5 * a *
               (frozen.C[k] - frozen.Gamma[k] - frozen.V - w +
                frozen.M[k] / a)
                   .squaredNorm();
    }
    return value;
  }
};

// Largest subgradient-optimality violation of the l2,1 proximal map:
// for nonzero output columns ||g - v + tau g/||g|| ||, for zeroed
// columns the amount by which ||v|| exceeds tau.
inline double prox_l21_kkt_violation(const Mat& input, const Mat& output,
                                     double tau) {
  double worst = 0.0;
  for (Index j = 0; j < input.cols(); ++j) {
    const double out_norm = output.col(j).norm();
    if (out_norm > 0.0) {
      const Vec resid =
          output.col(j) - input.col(j) + tau * output.col(j) / out_norm;
      worst = std::max(worst, resid.norm());
    } else {
      worst = std::max(worst, std::max(0.0, input.col(j).norm() - tau));
    }
  }
  return worst;
}

// ---- Exhaustive spanning-tree counter --------------------------------------

namespace detail {
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    for (int i = 0; i < n; ++i) parent[i] = i;
  }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};
}  // namespace detail

// Counts spanning trees by enumerating all (n-1)-edge subsets.
inline long count_spanning_trees(const Mat& adjacency) {
  const int n = static_cast<int>(adjacency.rows());
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (adjacency(i, j) != 0.0) edges.emplace_back(i, j);
    }
  }
  const int m = static_cast<int>(edges.size());
  if (m < n - 1) return 0;
  long count = 0;
  std::vector<int> pick(n - 1);
  std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == n - 1) {
      detail::UnionFind uf(n);
      for (int e = 0; e < n - 1; ++e) {
        if (!uf.unite(edges[pick[e]].first, edges[pick[e]].second)) return;
      }
      ++count;
      return;
    }
    for (int e = start; e < m; ++e) {
      pick[depth] = e;
      recurse(e + 1, depth + 1);
    }
  };
  if (n >= 2) recurse(0, 0);
  return count;
}

// ---- Exact single-view QP oracle -------------------------------------------
// Minimizes z^T w + a (2 ||w||^2 + sum_i d_i^2) over {w >= 0, sum w = n}
// by enumerating active sets and solving each equality-constrained KKT
// system. Exact for this strictly convex QP; practical for n <= 5.
inline double single_view_qp_oracle(const Mat& signals, double alpha_sv) {
  const Index n = signals.rows();
  const Index m = n * (n - 1) / 2;
  std::vector<std::pair<Index, Index>> edges;
  Vec z(m);
  {
    Index e = 0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        edges.emplace_back(i, j);
        z(e++) = (signals.row(i) - signals.row(j)).squaredNorm();
      }
    }
  }
  Mat btb = Mat::Zero(m, m);
  for (Index e = 0; e < m; ++e) {
    for (Index f = 0; f < m; ++f) {
      int shared = 0;
      if (edges[e].first == edges[f].first || edges[e].first == edges[f].second)
        ++shared;
      if (edges[e].second == edges[f].first ||
          edges[e].second == edges[f].second)
        ++shared;
      btb(e, f) = shared;
    }
  }
  const Mat hessian =
      alpha_sv * (4.0 * Mat::Identity(m, m) + 2.0 * btb);
  const double total = static_cast<double>(n);

  auto objective = [&](const Vec& w) {
    return z.dot(w) + 0.5 * w.dot(hessian * w);
  };

  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 1; mask < (1ULL << m); ++mask) {
    std::vector<Index> free;
    for (Index e = 0; e < m; ++e) {
      if (mask & (1ULL << e)) free.push_back(e);
    }
    const Index f = static_cast<Index>(free.size());
    Mat kkt = Mat::Zero(f + 1, f + 1);
    Vec rhs(f + 1);
    for (Index a = 0; a < f; ++a) {
      for (Index b = 0; b < f; ++b) kkt(a, b) = hessian(free[a], free[b]);
      kkt(a, f) = kkt(f, a) = 1.0;
      rhs(a) = -z(free[a]);
    }
    rhs(f) = total;
    const Vec sol = kkt.fullPivLu().solve(rhs);
    bool feasible = true;
    Vec w = Vec::Zero(m);
    for (Index a = 0; a < f; ++a) {
      if (sol(a) < -1e-10) feasible = false;
      w(free[a]) = std::max(0.0, sol(a));
    }
    if (!feasible) continue;
    // Multiplier sign check for the zeroed coordinates.
    const double lambda = sol(f);
    const Vec grad = z + hessian * w;
    for (Index e = 0; e < m && feasible; ++e) {
      if (!(mask & (1ULL << e)) && grad(e) - lambda < -1e-9) feasible = false;
    }
    if (feasible) best = std::min(best, objective(w));
  }
  return best;
}

}  // namespace testkit
