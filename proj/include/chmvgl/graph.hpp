#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace chmvgl {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Tolerances for the valid-Laplacian constraint set. Row-sum and
// off-diagonal slack are loose against accumulated solver round-off,
// tight against real constraint violations.
constexpr double kSymmetryTol = 1e-10;
constexpr double kRowSumTol = 1e-8;
constexpr double kOffDiagTol = 1e-8;
constexpr double kPsdTol = 1e-8;

// Default relative threshold used when binarizing learned graphs for
// edge detection (relative to the largest off-diagonal magnitude).
constexpr double kDefaultEdgeThreshold = 1e-2;

/// Thrown when an input matrix violates a documented precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A dense combinatorial graph Laplacian: symmetric, zero row sums,
// nonpositive off-diagonals, positive semidefinite. Immutable after
// construction; the constructor verifies every invariant.
class GraphLaplacian {
 public:
  explicit GraphLaplacian(Mat entries);

  // Checks the constraint set without constructing. When `why` is
  // non-null it receives a description of the first violation.
  static bool is_valid(const Mat& entries, std::string* why = nullptr);

  const Mat& matrix() const { return mat_; }
  Index nodes() const { return mat_.rows(); }

 private:
  Mat mat_;
};

// Orthonormal basis of the complement of the all-ones vector:
// P is n x (n-1) with P^T P = I and P^T 1 = 0. Conjugation
// M -> P M P^T maps symmetric PSD (n-1)x(n-1) matrices onto
// {L : L1 = 0, L PSD}.
class ProjectionBasis {
 public:
  explicit ProjectionBasis(Mat p);

  const Mat& matrix() const { return p_; }
  Index nodes() const { return p_.rows(); }

  Mat lift(const Mat& small) const { return p_ * small * p_.transpose(); }
  Mat reduce(const Mat& big) const { return p_.transpose() * big * p_; }

 private:
  Mat p_;
};

// K signal matrices over a shared node set; view k holds n x d_k samples.
class MultiviewSignals {
 public:
  explicit MultiviewSignals(std::vector<Mat> views);

  int num_views() const { return static_cast<int>(views_.size()); }
  Index nodes() const { return views_.front().rows(); }
  Index samples(int k) const { return views_.at(k).cols(); }
  const Mat& view(int k) const { return views_.at(k); }
  const std::vector<Mat>& views() const { return views_; }

 private:
  std::vector<Mat> views_;
};

// Per-view Laplacians decomposed as L^k = S^k + V + V^T: a view-specific
// part S^k plus a hub part shared across views.
struct CoHubDecomposition {
  std::vector<GraphLaplacian> laplacians;
  std::vector<Mat> specifics;
  Mat hub_matrix;

  int num_views() const { return static_cast<int>(laplacians.size()); }

  // Largest relative reconstruction error ||L^k - S^k - V - V^T||_F
  // over views, scaled by max(1, ||L^k||_F).
  double consistency_error() const;
  bool is_consistent(double tol = 1e-6) const;
};

// L = diag(A 1) - A. Rejects non-symmetric, negative, or
// nonzero-diagonal adjacency input, naming the offending entry.
GraphLaplacian laplacian_from_adjacency(const Mat& adjacency);

// Deterministic Householder construction: reflect 1/sqrt(n) onto e_1 and
// drop the first column of the reflector. O(n^2).
ProjectionBasis build_projection_basis(Index n);

// tr(X^T L X), the total variation of the columns of X on the graph.
double total_variation(const GraphLaplacian& laplacian, const Mat& signals);

// Repairs a raw solver output into a valid Laplacian: symmetrize, clip
// positive off-diagonals to zero, drop off-diagonals below
// edge_threshold * max|offdiag|, then reset the diagonal so every row
// sums to zero. Idempotent; edge_threshold = 0 keeps all retained signs.
GraphLaplacian postprocess_laplacian(const Mat& raw, double edge_threshold);

// Nonnegative adjacency read off a Laplacian: A_ij = max(0, -L_ij) for
// i != j, zero diagonal.
Mat adjacency_from_laplacian(const Mat& laplacian);

}  // namespace chmvgl
