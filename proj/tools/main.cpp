// chmvgl command-line tool: synthetic dataset generation, co-hub
// multiview graph learning, BIC hyperparameter sweeps, and the
// benchmark suites. See README.md for the config file format.

#include "chmvgl/experiments.hpp"
#include "chmvgl/parallel.hpp"
#include "chmvgl/rng.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using namespace chmvgl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumerical = 3;

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  return read_json(path);
}

json config_section(const json& config, const char* name) {
  return config.contains(name) ? config.at(name) : json::object();
}

void ensure_out_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) {
    throw IoError("cannot create output directory: " + out.string());
  }
}

int cmd_generate(const std::string& config_path, const fs::path& out,
                 std::uint64_t seed) {
  const json config = load_config(config_path);
  const DatasetSpec spec =
      dataset_spec_from_json(config_section(config, "generator"));
  ensure_out_dir(out);

  const SyntheticDataset data = make_dataset(spec, seed);

  DatasetManifest manifest;
  manifest.n = spec.graph.n;
  manifest.num_views = spec.num_views;
  manifest.has_truth = true;
  manifest.seed = seed;
  manifest.generator_echo = dataset_spec_to_json(spec);
  for (int k = 0; k < spec.num_views; ++k) {
    const std::string view_file = "view_" + std::to_string(k) + ".csv";
    const std::string truth_file = "truth_" + std::to_string(k) + ".csv";
    write_matrix_csv(out / view_file, data.signals[k]);
    write_edge_list_csv(out / truth_file, data.adjacencies[k]);
    manifest.view_files.push_back(view_file);
    manifest.truth_files.push_back(truth_file);
    manifest.samples.push_back(spec.samples_per_view);
  }
  manifest.hub_indices = data.hub_indices;

  json hubs;
  hubs["hub_indices"] = data.hub_indices;
  write_json(out / "hubs.json", hubs);
  write_matrix_csv(out / "truth_hub_matrix.csv", data.hub_matrix);
  write_manifest(out / "manifest.json", manifest);
  std::cout << "wrote dataset (" << spec.num_views << " views, n = "
            << spec.graph.n << ") to " << out.string() << "\n";
  return kExitOk;
}

int cmd_solve(const std::string& manifest_path, const std::string& config_path,
              const fs::path& out) {
  const json config = load_config(config_path);
  const json solver_section = config_section(config, "solver");
  const SolverConfig solver = solver_config_from_json(solver_section);
  const double edge_threshold = edge_threshold_from_json(solver_section);
  const json hub_section = config_section(config, "hubs");
  int top_k = hub_section.contains("top_k")
                  ? hub_section.at("top_k").get<int>()
                  : 0;
  const double hub_threshold = hub_section.contains("threshold")
                                   ? hub_section.at("threshold").get<double>()
                                   : 0.5;

  const DatasetManifest manifest = load_manifest(manifest_path);
  const MultiviewSignals signals = load_signals(manifest_path, manifest);
  ensure_out_dir(out);

  json result;
  result["manifest"] = manifest_path;
  result["config_echo"]["solver"] = solver_config_to_json(solver);
  result["config_echo"]["solver"]["edge_threshold"] = edge_threshold;
  result["seed"] = manifest.seed;

  const auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  try {
    report = solve(sample_normalized(signals), solver);
  } catch (const DivergenceError& err) {
    result["diverged"] = true;
    result["error"] = err.what();
    write_json(out / "result.json", result);
    std::cerr << "solver diverged: " << err.what() << "\n";
    return kExitNumerical;
  }
  const double solve_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  // Learned edge lists: weights are the negated off-diagonals that
  // survive the output binarization threshold.
  for (int k = 0; k < manifest.num_views; ++k) {
    const GraphLaplacian display = postprocess_laplacian(
        report.decomposition.laplacians[k].matrix(), edge_threshold);
    write_edge_list_csv(out / ("learned_" + std::to_string(k) + ".csv"),
                        adjacency_from_laplacian(display.matrix()));
  }

  const HubRanking ranking = rank_cohubs(report.decomposition.hub_matrix);
  {
    std::ofstream norms(out / "v_column_norms.csv");
    norms << std::setprecision(17);
    for (std::size_t i = 0; i < ranking.node_order.size(); ++i) {
      norms << ranking.node_order[i] << ',' << ranking.sorted_norms[i] << '\n';
    }
  }
  const std::set<Index> selected =
      top_k > 0 ? select_hubs(ranking, HubSelection::TopK(top_k))
                : select_hubs(ranking, HubSelection::Threshold(hub_threshold));

  result["converged"] = report.converged;
  result["iterations"] = report.iterations;
  result["final_alpha"] = report.final_alpha;
  result["max_residual_history"] = report.max_residual_history;
  result["objective_history"] = report.objective_history;
  result["wall_clock_seconds"]["solve"] = solve_seconds;
  result["hub_ranking"]["node_order"] = ranking.node_order;
  result["hub_ranking"]["sorted_norms"] = ranking.sorted_norms;
  result["selected_hubs"] = std::vector<Index>(selected.begin(), selected.end());

  if (manifest.has_truth) {
    const fs::path base = fs::path(manifest_path).parent_path();
    json f1s = json::array();
    for (int k = 0; k < manifest.num_views; ++k) {
      const Mat truth_adj =
          read_edge_list_csv(base / manifest.truth_files[k], manifest.n);
      f1s.push_back(f1_edges(laplacian_from_adjacency(truth_adj),
                             report.decomposition.laplacians[k],
                             edge_threshold));
    }
    result["per_view_f1"] = f1s;
    const std::set<Index> true_hubs(manifest.hub_indices.begin(),
                                    manifest.hub_indices.end());
    result["hub_recovery_f1"] = hub_recovery_f1(true_hubs, selected);
  } else {
    result["per_view_f1"] = nullptr;
    result["hub_recovery_f1"] = nullptr;
  }
  write_json(out / "result.json", result);
  std::cout << (report.converged ? "converged" : "stopped at max_iter")
            << " after " << report.iterations << " iterations\n";
  return kExitOk;
}

int cmd_bic(const std::string& manifest_path, const std::string& config_path,
            const fs::path& out, int threads) {
  const json config = load_config(config_path);
  const SolverConfig solver =
      solver_config_from_json(config_section(config, "solver"));
  const std::vector<GammaTuple> grid =
      grid_from_json(config_section(config, "grid"));

  const DatasetManifest manifest = load_manifest(manifest_path);
  const MultiviewSignals signals = load_signals(manifest_path, manifest);
  ensure_out_dir(out);

  GridSearchResult result;
  try {
    result = grid_search(signals, grid, solver, threads);
  } catch (const DivergenceError&) {
    std::cerr << "every grid point diverged\n";
    return kExitNumerical;
  }

  {
    std::ofstream table(out / "bic_table.csv");
    table << std::setprecision(17);
    table << "gamma1,gamma2,gamma3,gamma4,score,df,df_star,converged\n";
    for (const BicResult& row : result.table) {
      table << row.gamma[0] << ',' << row.gamma[1] << ',' << row.gamma[2]
            << ',' << row.gamma[3] << ',' << row.score << ',' << row.df << ','
            << row.df_star << ',' << (row.converged ? 1 : 0) << '\n';
    }
  }
  json best;
  best["gamma1"] = result.best().gamma[0];
  best["gamma2"] = result.best().gamma[1];
  best["gamma3"] = result.best().gamma[2];
  best["gamma4"] = result.best().gamma[3];
  best["score"] = result.best().score;
  best["df"] = result.best().df;
  best["df_star"] = result.best().df_star;
  best["row"] = result.best_index;
  write_json(out / "best_gamma.json", best);
  std::cout << "best gamma = (" << result.best().gamma[0] << ", "
            << result.best().gamma[1] << ", " << result.best().gamma[2] << ", "
            << result.best().gamma[3] << "), score " << result.best().score
            << "\n";
  return kExitOk;
}

int cmd_benchmark(const std::string& suite, const std::string& config_path,
                  const fs::path& out, std::uint64_t seed, int threads) {
  const json config = load_config(config_path);
  const json suite_section = config_section(config, "suite");

  BenchmarkOptions options;
  options.seed = seed;
  options.threads = threads;
  if (config.contains("generator")) {
    options.base = dataset_spec_from_json(config.at("generator"));
  }
  if (config.contains("solver")) {
    options.solver = solver_config_from_json(config.at("solver"));
  }
  if (suite_section.contains("realizations")) {
    options.realizations = suite_section.at("realizations").get<int>();
  }
  auto ints = [&](const char* key, std::vector<int> fallback) {
    return suite_section.contains(key)
               ? suite_section.at(key).get<std::vector<int>>()
               : fallback;
  };
  ensure_out_dir(out);

  if (suite == "views") {
    write_sweep_csv(out / "views.csv",
                    benchmark_views(options, ints("k_values", {2, 3, 4, 5, 6})));
  } else if (suite == "hubs") {
    write_sweep_csv(out / "hubs.csv",
                    benchmark_hubs(options, ints("hub_counts", {1, 2, 4})));
  } else if (suite == "noise") {
    std::vector<double> etas = {10, 30, 50, 70};
    if (suite_section.contains("eta_values")) {
      etas = suite_section.at("eta_values").get<std::vector<double>>();
    }
    write_sweep_csv(out / "noise.csv", benchmark_noise(options, etas));
  } else if (suite == "models") {
    write_sweep_csv(out / "models.csv", benchmark_models(options));
  } else if (suite == "scalability") {
    std::vector<Index> n_values = {32, 64, 128};
    if (suite_section.contains("n_values")) {
      n_values = suite_section.at("n_values").get<std::vector<Index>>();
    }
    const std::vector<ScalabilityRow> rows = benchmark_scalability(
        options, n_values, ints("k_values", {2, 4, 6}));
    std::vector<ScalabilityRow> by_n, by_k;
    for (const ScalabilityRow& row : rows) {
      (row.axis == "n" ? by_n : by_k).push_back(row);
    }
    write_scalability_csv(out / "scalability_n.csv", by_n);
    write_scalability_csv(out / "scalability_k.csv", by_k);
  } else {
    std::cerr << "unknown suite '" << suite
              << "'; valid: views, hubs, noise, models, scalability\n";
    return kExitConfig;
  }
  std::cout << "suite '" << suite << "' written to " << out.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-hub multiview graph learning"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, suite;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd, bool with_manifest) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "base RNG seed");
    cmd->add_option("--threads", threads, "worker threads for sweeps");
    if (with_manifest) {
      cmd->add_option("manifest", manifest_path, "dataset manifest.json")
          ->required();
    }
  };

  CLI::App* generate = app.add_subcommand("generate", "synthesize a dataset");
  add_common(generate, false);
  CLI::App* solve_cmd = app.add_subcommand("solve", "learn co-hub Laplacians");
  add_common(solve_cmd, true);
  CLI::App* bic = app.add_subcommand("bic", "BIC grid sweep");
  add_common(bic, true);
  CLI::App* benchmark = app.add_subcommand("benchmark", "run a benchmark suite");
  add_common(benchmark, false);
  benchmark->add_option("--suite", suite, "views|hubs|noise|models|scalability")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) return cmd_generate(config_path, out_dir, seed);
    if (solve_cmd->parsed()) return cmd_solve(manifest_path, config_path, out_dir);
    if (bic->parsed()) return cmd_bic(manifest_path, config_path, out_dir, threads);
    if (benchmark->parsed()) {
      return cmd_benchmark(suite, config_path, out_dir, seed, threads);
    }
  } catch (const ValidationError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  } catch (const DivergenceError& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& err) {
    std::cerr << "io error: " << err.what() << "\n";
    return kExitIo;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
