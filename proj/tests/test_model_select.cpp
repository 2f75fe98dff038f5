#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "chmvgl/model_select.hpp"
#include "chmvgl/rng.hpp"
#include "chmvgl/synth.hpp"
#include "support.hpp"

#include <cmath>

using namespace chmvgl;

namespace {

GraphLaplacian path_laplacian(Index n) {
  Mat adj = Mat::Zero(n, n);
  for (Index i = 0; i + 1 < n; ++i) adj(i, i + 1) = adj(i + 1, i) = 1.0;
  return laplacian_from_adjacency(adj);
}

GraphLaplacian complete_laplacian(Index n) {
  Mat adj = Mat::Ones(n, n);
  adj.diagonal().setZero();
  return laplacian_from_adjacency(adj);
}

}  // namespace

TEST_CASE("log pseudo-determinant closed forms") {
  CHECK(log_pseudo_det(path_laplacian(2)) == doctest::Approx(std::log(2.0)));
  CHECK(log_pseudo_det(complete_laplacian(3)) ==
        doctest::Approx(2.0 * std::log(3.0)));
  CHECK(log_pseudo_det(GraphLaplacian(Mat::Zero(4, 4))) == 0.0);
}

TEST_CASE("log pseudo-determinant equals log(n * spanning trees)") {
  for (Index n : {2, 3, 4, 5, 6}) {
    for (bool complete : {false, true}) {
      const GraphLaplacian lap =
          complete ? complete_laplacian(n) : path_laplacian(n);
      const Mat adj = adjacency_from_laplacian(lap.matrix());
      const long trees = testkit::count_spanning_trees(adj);
      REQUIRE(trees > 0);
      CHECK(log_pseudo_det(lap) ==
            doctest::Approx(std::log(static_cast<double>(n) * trees))
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("view NLL plug-in arithmetic") {
  const GraphLaplacian lap = path_laplacian(2);
  const Mat x = (Mat(2, 1) << 1, 0).finished();
  CHECK(view_nll(lap, x) == doctest::Approx(0.5 * (std::log(2.0) + 1.0)));
  CHECK(view_nll(lap, x, /*sign_corrected=*/true) ==
        doctest::Approx(0.5 * (-std::log(2.0) + 1.0)));

  // Columns in the null space leave only the logdet term.
  const Mat constant = Mat::Ones(2, 5) * 3.0;
  CHECK(view_nll(lap, constant) == doctest::Approx(0.5 * 5.0 * std::log(2.0)));
}

TEST_CASE("hub column counting") {
  CHECK(count_hub_df(Mat::Zero(6, 6), 1e-8) == 0);

  Mat v = Mat::Zero(5, 5);
  v.col(0).setConstant(1.0);
  v.col(2).setConstant(-0.3);
  v.col(4).setConstant(2.0);
  CHECK(count_hub_df(v, 1e-8) == 3);

  Mat scaled = Mat::Zero(4, 4);
  scaled(0, 0) = 1.0;
  scaled(0, 1) = 0.5;
  scaled(0, 2) = 1e-12;
  CHECK(count_hub_df(scaled, 1e-8) == 2);
}

TEST_CASE("BIC assembly and df identity") {
  DatasetSpec spec;
  spec.graph.n = 4;
  spec.num_views = 2;
  spec.num_hubs = 0;
  spec.samples_per_view = 25;
  const SyntheticDataset data = make_dataset(spec, 2);
  const MultiviewSignals signals(data.signals);

  CoHubDecomposition decomp;
  for (int k = 0; k < 2; ++k) {
    decomp.laplacians.push_back(laplacian_from_adjacency(data.adjacencies[k]));
    decomp.specifics.push_back(decomp.laplacians[k].matrix());
  }
  decomp.hub_matrix = Mat::Zero(4, 4);
  decomp.hub_matrix.col(1).setConstant(0.5);  // df* = 1

  const BicResult result = bic_score(decomp, signals);
  CHECK(result.df_star == 1);
  CHECK(result.df == doctest::Approx(13.0));  // 2 * 4 * 3 / 2 + 1
  const double n_obs = 2.0 * 25.0 * 4.0;
  CHECK(result.score ==
        doctest::Approx(result.loglik_term + std::log(n_obs) * 13.0));

  // V = 0 -> df comes from the Laplacians alone.
  decomp.hub_matrix.setZero();
  CHECK(bic_score(decomp, signals).df == doctest::Approx(12.0));
}

TEST_CASE("BIC N factor arithmetic") {
  DatasetSpec spec;
  spec.graph.n = 10;
  spec.num_views = 1;
  spec.num_hubs = 0;
  spec.samples_per_view = 100;
  const SyntheticDataset data = make_dataset(spec, 3);
  const MultiviewSignals signals(data.signals);
  CoHubDecomposition decomp;
  decomp.laplacians.push_back(laplacian_from_adjacency(data.adjacencies[0]));
  decomp.specifics.push_back(decomp.laplacians[0].matrix());
  decomp.hub_matrix = Mat::Zero(10, 10);
  const BicResult result = bic_score(decomp, signals);
  // N = d * n = 1000.
  CHECK(result.score - result.loglik_term ==
        doctest::Approx(std::log(1000.0) * result.df));
}

TEST_CASE("BIC is invariant to view order") {
  DatasetSpec spec;
  spec.graph.n = 6;
  spec.num_views = 3;
  spec.num_hubs = 1;
  spec.samples_per_view = 30;
  const SyntheticDataset data = make_dataset(spec, 4);

  CoHubDecomposition decomp;
  for (int k = 0; k < 3; ++k) {
    decomp.laplacians.push_back(laplacian_from_adjacency(data.adjacencies[k]));
    decomp.specifics.push_back(decomp.laplacians[k].matrix());
  }
  decomp.hub_matrix = Mat::Zero(6, 6);
  const double forward =
      bic_score(decomp, MultiviewSignals(data.signals)).score;

  CoHubDecomposition reversed;
  std::vector<Mat> reversed_signals;
  for (int k = 2; k >= 0; --k) {
    reversed.laplacians.push_back(decomp.laplacians[k]);
    reversed.specifics.push_back(decomp.specifics[k]);
    reversed_signals.push_back(data.signals[k]);
  }
  reversed.hub_matrix = Mat::Zero(6, 6);
  const double backward =
      bic_score(reversed, MultiviewSignals(reversed_signals)).score;
  CHECK(forward == doctest::Approx(backward).epsilon(1e-10));
}

TEST_CASE("grid search: single point, duplicates, and determinism") {
  DatasetSpec spec;
  spec.graph.n = 8;
  spec.num_views = 2;
  spec.num_hubs = 1;
  spec.samples_per_view = 60;
  const SyntheticDataset data = make_dataset(spec, 5);
  const MultiviewSignals signals(data.signals);

  SolverConfig config;
  config.max_iter = 120;

  const GammaTuple point{0.1, 1.0, 0.1, 0.1};
  const GridSearchResult one = grid_search(signals, {point}, config);
  CHECK(one.table.size() == 1);
  CHECK(one.best_index == 0);
  CHECK(one.best().gamma == point);

  const GridSearchResult dup = grid_search(signals, {point, point}, config);
  CHECK(dup.table[0].score == doctest::Approx(dup.table[1].score));
  CHECK(dup.best_index == 0);  // lexicographic tie-break keeps the first

  const GridSearchResult again = grid_search(signals, {point, point}, config);
  CHECK(again.table[0].score == doctest::Approx(dup.table[0].score));
}

TEST_CASE("grid search runs identically across thread counts") {
  DatasetSpec spec;
  spec.graph.n = 6;
  spec.num_views = 2;
  spec.num_hubs = 1;
  spec.samples_per_view = 40;
  const SyntheticDataset data = make_dataset(spec, 6);
  const MultiviewSignals signals(data.signals);
  SolverConfig config;
  config.max_iter = 80;
  std::vector<GammaTuple> grid;
  for (double g3 : {0.01, 0.1, 1.0}) grid.push_back({0.1, 1.0, g3, 0.1});

  const GridSearchResult serial = grid_search(signals, grid, config, 1);
  const GridSearchResult parallel = grid_search(signals, grid, config, 2);
  REQUIRE(serial.table.size() == parallel.table.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(serial.table[i].score == parallel.table[i].score);
  }
  CHECK(serial.best_index == parallel.best_index);
}

TEST_CASE("default grid has the documented shape") {
  const std::vector<GammaTuple> grid = default_gamma_grid();
  CHECK(grid.size() == 81);
}
