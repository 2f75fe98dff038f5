#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chmvgl/graph.hpp"
#include "chmvgl/rng.hpp"
#include "support.hpp"

using namespace chmvgl;

namespace {

Mat path2_laplacian() {
  Mat l(2, 2);
  l << 1, -1, -1, 1;
  return l;
}

}  // namespace

TEST_CASE("laplacian_from_adjacency on a single edge") {
  Mat a(2, 2);
  a << 0, 1, 1, 0;
  const GraphLaplacian lap = laplacian_from_adjacency(a);
  CHECK(lap.matrix().isApprox(path2_laplacian(), 1e-15));
}

TEST_CASE("laplacian_from_adjacency on the empty graph") {
  const GraphLaplacian lap = laplacian_from_adjacency(Mat::Zero(3, 3));
  CHECK(lap.matrix().isZero(0.0));
}

TEST_CASE("laplacian_from_adjacency with fractional weight") {
  Mat a(2, 2);
  a << 0, 0.5, 0.5, 0;
  Mat expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  CHECK(laplacian_from_adjacency(a).matrix().isApprox(expected, 1e-15));
}

TEST_CASE("laplacian_from_adjacency rejects bad input, naming the entry") {
  Mat a = Mat::Zero(3, 3);
  a(0, 1) = 1.0;  // asymmetric
  CHECK_THROWS_WITH_AS(laplacian_from_adjacency(a),
                       doctest::Contains("(0,1)"), ValidationError);

  Mat b = Mat::Zero(2, 2);
  b(0, 1) = b(1, 0) = -0.5;
  CHECK_THROWS_WITH_AS(laplacian_from_adjacency(b),
                       doctest::Contains("negative"), ValidationError);

  Mat c = Mat::Zero(2, 2);
  c(1, 1) = 2.0;
  CHECK_THROWS_WITH_AS(laplacian_from_adjacency(c),
                       doctest::Contains("diagonal"), ValidationError);
}

TEST_CASE("projection basis for n=2 is the expected column up to sign") {
  const ProjectionBasis p = build_projection_basis(2);
  const double s = 1.0 / std::sqrt(2.0);
  const bool plus = p.matrix().isApprox((Mat(2, 1) << s, -s).finished(), 1e-12);
  const bool minus =
      p.matrix().isApprox((Mat(2, 1) << -s, s).finished(), 1e-12);
  CHECK((plus || minus));
}

TEST_CASE("projection basis rejects n < 2") {
  CHECK_THROWS_AS(build_projection_basis(1), ValidationError);
}

TEST_CASE("projection basis is orthonormal and annihilates ones") {
  for (Index n : {2, 3, 5, 17, 64}) {
    const ProjectionBasis p = build_projection_basis(n);
    const Mat gram = p.matrix().transpose() * p.matrix();
    CHECK((gram - Mat::Identity(n - 1, n - 1)).norm() <= 1e-12);
    CHECK((p.matrix().transpose() * Vec::Ones(n)).norm() <= 1e-12);
  }
}

TEST_CASE("conjugation maps PSD matrices into zero-row-sum PSD matrices") {
  SplitMix64 rng(42);
  const Index n = 8;
  const ProjectionBasis p = build_projection_basis(n);
  for (int trial = 0; trial < 100; ++trial) {
    const Mat a = testkit::random_matrix(n - 1, n - 1, rng);
    const Mat psd = a * a.transpose();
    const Mat lifted = p.lift(psd);
    CHECK((lifted * Vec::Ones(n)).norm() <= 1e-10 * std::max(1.0, psd.norm()));
    Eigen::SelfAdjointEigenSolver<Mat> eig(lifted, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues().minCoeff() >=
          -1e-10 * std::max(1.0, eig.eigenvalues().maxCoeff()));
  }
}

TEST_CASE("lifted symmetric matrices have zero row sums") {
  SplitMix64 rng(7);
  const ProjectionBasis p = build_projection_basis(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat m = testkit::random_symmetric(5, rng);
    CHECK((p.lift(m) * Vec::Ones(6)).norm() <= 1e-10 * std::max(1.0, m.norm()));
  }
}

TEST_CASE("total variation on the path-2 Laplacian") {
  const GraphLaplacian lap(path2_laplacian());
  CHECK(total_variation(lap, (Mat(2, 1) << 1, 1).finished()) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(total_variation(lap, (Mat(2, 1) << 1, 0).finished()) ==
        doctest::Approx(1.0));
  CHECK(total_variation(lap, (Mat(2, 1) << 1, -1).finished()) ==
        doctest::Approx(4.0));
}

TEST_CASE("total variation rejects a dimension mismatch") {
  const GraphLaplacian lap(path2_laplacian());
  CHECK_THROWS_AS(total_variation(lap, Mat::Zero(3, 1)), ValidationError);
}

TEST_CASE("total variation equals the pairwise-difference form") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Index n = 6;
    Mat adj = Mat::Zero(n, n);
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        if (rng.next_bernoulli(0.5)) {
          adj(i, j) = adj(j, i) = rng.next_double() + 0.1;
        }
      }
    }
    const GraphLaplacian lap = laplacian_from_adjacency(adj);
    const Mat x = testkit::random_matrix(n, 4, rng);
    double pairwise = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        pairwise += -lap.matrix()(i, j) * (x.row(i) - x.row(j)).squaredNorm();
      }
    }
    CHECK(total_variation(lap, x) == doctest::Approx(pairwise).epsilon(1e-8));
  }
}

TEST_CASE("postprocess keeps a valid Laplacian fixed") {
  Mat adj = Mat::Zero(4, 4);
  adj(0, 1) = adj(1, 0) = 1.0;
  adj(1, 2) = adj(2, 1) = 0.5;
  adj(2, 3) = adj(3, 2) = 2.0;
  const Mat lap = laplacian_from_adjacency(adj).matrix();
  CHECK((postprocess_laplacian(lap, 1e-2).matrix() - lap).cwiseAbs().maxCoeff() <=
        1e-12);
}

TEST_CASE("postprocess clips positive off-diagonals and fixes the diagonal") {
  Mat raw = path2_laplacian();
  Mat bigger = Mat::Zero(3, 3);
  bigger.topLeftCorner(2, 2) = raw;
  bigger(0, 2) = bigger(2, 0) = 1e-3;  // positive off-diagonal
  const GraphLaplacian cleaned = postprocess_laplacian(bigger, 0.0);
  CHECK(cleaned.matrix()(0, 2) == 0.0);
  CHECK(cleaned.matrix()(0, 0) == doctest::Approx(1.0));
  CHECK((cleaned.matrix() * Vec::Ones(3)).norm() <= 1e-14);
}

TEST_CASE("postprocess undoes a tiny asymmetric perturbation") {
  Mat raw = path2_laplacian();
  raw(0, 1) += 1e-9;
  const GraphLaplacian cleaned = postprocess_laplacian(raw, 1e-2);
  CHECK((cleaned.matrix() - path2_laplacian()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("postprocess is idempotent") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const Mat raw = testkit::random_matrix(7, 7, rng);
    const Mat once = postprocess_laplacian(raw, 1e-2).matrix();
    const Mat twice = postprocess_laplacian(once, 1e-2).matrix();
    CHECK((once - twice).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("GraphLaplacian validation rejects violations") {
  Mat notsym = path2_laplacian();
  notsym(0, 1) = 0.5;
  CHECK_FALSE(GraphLaplacian::is_valid(notsym));

  Mat posoff(2, 2);
  posoff << -1, 1, 1, -1;  // negative semidefinite, positive off-diagonal
  CHECK_FALSE(GraphLaplacian::is_valid(posoff));

  Mat badrows(2, 2);
  badrows << 1, -0.5, -0.5, 1;
  CHECK_FALSE(GraphLaplacian::is_valid(badrows));

  CHECK(GraphLaplacian::is_valid(path2_laplacian()));
}

TEST_CASE("CoHubDecomposition consistency error") {
  Mat adj = Mat::Zero(3, 3);
  adj(0, 1) = adj(1, 0) = 1.0;
  const GraphLaplacian lap = laplacian_from_adjacency(adj);
  CoHubDecomposition decomp;
  decomp.laplacians.push_back(lap);
  decomp.specifics.push_back(lap.matrix());
  decomp.hub_matrix = Mat::Zero(3, 3);
  CHECK(decomp.is_consistent(1e-12));
  decomp.hub_matrix(0, 0) = 0.5;
  CHECK_FALSE(decomp.is_consistent(1e-6));
}
