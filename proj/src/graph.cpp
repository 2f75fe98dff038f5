#include "chmvgl/graph.hpp"

#include <cmath>
#include <sstream>

namespace chmvgl {

namespace {

std::string entry_name(Index i, Index j) {
  std::ostringstream os;
  os << "(" << i << "," << j << ")";
  return os.str();
}

}  // namespace

GraphLaplacian::GraphLaplacian(Mat entries) : mat_(std::move(entries)) {
  std::string why;
  if (!is_valid(mat_, &why)) {
    throw ValidationError("not a valid Laplacian: " + why);
  }
}

bool GraphLaplacian::is_valid(const Mat& entries, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why != nullptr) *why = msg;
    return false;
  };
  const Index n = entries.rows();
  if (n < 1 || entries.cols() != n) return fail("matrix is not square");
  if (!entries.allFinite()) return fail("matrix has non-finite entries");

  const double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (std::abs(entries(i, j) - entries(j, i)) > kSymmetryTol * scale) {
        return fail("asymmetric at " + entry_name(i, j));
      }
      if (entries(i, j) > kOffDiagTol) {
        return fail("positive off-diagonal at " + entry_name(i, j));
      }
    }
    if (std::abs(entries.row(i).sum()) > kRowSumTol) {
      return fail("row " + std::to_string(i) + " does not sum to zero");
    }
  }

  Eigen::SelfAdjointEigenSolver<Mat> eig(entries, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return fail("eigendecomposition failed");
  const double lambda_min = eig.eigenvalues().minCoeff();
  const double lambda_max = eig.eigenvalues().maxCoeff();
  if (lambda_min < -kPsdTol * std::max(lambda_max, 0.0)) {
    return fail("not positive semidefinite (lambda_min = " +
                std::to_string(lambda_min) + ")");
  }
  return true;
}

ProjectionBasis::ProjectionBasis(Mat p) : p_(std::move(p)) {
  const Index n = p_.rows();
  if (n < 2 || p_.cols() != n - 1) {
    throw ValidationError("projection basis must be n x (n-1) with n >= 2");
  }
  const Mat gram = p_.transpose() * p_;
  const double ortho = (gram - Mat::Identity(n - 1, n - 1)).norm();
  const double ones = (p_.transpose() * Vec::Ones(n)).norm();
  if (ortho > 1e-10 || ones > 1e-10) {
    throw ValidationError("projection basis is not an orthonormal complement of 1");
  }
}

MultiviewSignals::MultiviewSignals(std::vector<Mat> views) : views_(std::move(views)) {
  if (views_.empty()) throw ValidationError("need at least one view");
  const Index n = views_.front().rows();
  for (std::size_t k = 0; k < views_.size(); ++k) {
    if (views_[k].rows() != n) {
      throw ValidationError("view " + std::to_string(k) +
                            " has a different node count");
    }
    if (views_[k].cols() < 1) {
      throw ValidationError("view " + std::to_string(k) + " has no samples");
    }
    if (!views_[k].allFinite()) {
      throw ValidationError("view " + std::to_string(k) +
                            " has non-finite entries");
    }
  }
}

double CoHubDecomposition::consistency_error() const {
  double worst = 0.0;
  for (int k = 0; k < num_views(); ++k) {
    const Mat& lk = laplacians[k].matrix();
    const double err =
        (lk - specifics[k] - hub_matrix - hub_matrix.transpose()).norm();
    worst = std::max(worst, err / std::max(1.0, lk.norm()));
  }
  return worst;
}

bool CoHubDecomposition::is_consistent(double tol) const {
  return consistency_error() <= tol;
}

GraphLaplacian laplacian_from_adjacency(const Mat& adjacency) {
  const Index n = adjacency.rows();
  if (adjacency.cols() != n) {
    throw ValidationError("adjacency matrix is not square");
  }
  const double scale = std::max(1.0, adjacency.cwiseAbs().maxCoeff());
  for (Index i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) {
      throw ValidationError("adjacency has nonzero diagonal at " +
                            entry_name(i, i));
    }
    for (Index j = 0; j < n; ++j) {
      if (adjacency(i, j) < 0.0) {
        throw ValidationError("adjacency has negative entry at " +
                              entry_name(i, j));
      }
      if (std::abs(adjacency(i, j) - adjacency(j, i)) > 1e-12 * scale) {
        throw ValidationError("adjacency is asymmetric at " + entry_name(i, j));
      }
    }
  }
  Mat lap = -adjacency;
  lap.diagonal() = adjacency.rowwise().sum();
  return GraphLaplacian(std::move(lap));
}

ProjectionBasis build_projection_basis(Index n) {
  if (n < 2) throw ValidationError("projection basis needs n >= 2");
  // Householder reflector H = I - beta v v^T with v = 1/sqrt(n) - e_1
  // maps 1/sqrt(n) to e_1; its trailing n-1 columns are an orthonormal
  // basis of the complement of the ones vector.
  Vec v = Vec::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  v(0) -= 1.0;
  const double beta = 2.0 / v.squaredNorm();
  Mat p(n, n - 1);
  for (Index j = 0; j < n - 1; ++j) {
    p.col(j) = -beta * v(j + 1) * v;
    p(j + 1, j) += 1.0;
  }
  return ProjectionBasis(std::move(p));
}

double total_variation(const GraphLaplacian& laplacian, const Mat& signals) {
  if (signals.rows() != laplacian.nodes()) {
    throw ValidationError("signal row count does not match node count");
  }
  return (laplacian.matrix() * signals).cwiseProduct(signals).sum();
}

GraphLaplacian postprocess_laplacian(const Mat& raw, double edge_threshold) {
  const Index n = raw.rows();
  if (raw.cols() != n) throw ValidationError("matrix is not square");
  if (!raw.allFinite()) throw ValidationError("matrix has non-finite entries");

  Mat out = 0.5 * (raw + raw.transpose());
  out.diagonal().setZero();
  out = out.cwiseMin(0.0);  // valid Laplacians have nonpositive off-diagonals

  const double max_off = out.cwiseAbs().maxCoeff();
  if (max_off > 0.0 && edge_threshold > 0.0) {
    const double cut = edge_threshold * max_off;
    out = (out.array().abs() < cut).select(0.0, out);
  }
  out.diagonal() = -out.rowwise().sum();
  return GraphLaplacian(std::move(out));
}

Mat adjacency_from_laplacian(const Mat& laplacian) {
  Mat adj = (-laplacian).cwiseMax(0.0);
  adj.diagonal().setZero();
  return adj;
}

}  // namespace chmvgl
