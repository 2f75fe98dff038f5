#include "chmvgl/experiments.hpp"

#include "chmvgl/parallel.hpp"
#include "chmvgl/rng.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>

namespace chmvgl {

namespace {

void reject_unknown_keys(const json& section,
                         const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : section.items()) {
    if (known.count(item.key()) == 0) {
      throw ValidationError("unknown key '" + item.key() + "' in " + where);
    }
  }
}

GraphModel model_from_string(const std::string& name) {
  if (name == "er") return GraphModel::kErdosRenyi;
  if (name == "ba") return GraphModel::kBarabasiAlbert;
  if (name == "rgg") return GraphModel::kRandomGeometric;
  throw ValidationError("generator.model must be er, ba, or rgg (got '" +
                        name + "')");
}

std::string model_to_string(GraphModel kind) {
  switch (kind) {
    case GraphModel::kErdosRenyi: return "er";
    case GraphModel::kBarabasiAlbert: return "ba";
    case GraphModel::kRandomGeometric: return "rgg";
  }
  return "er";
}

FilterKind filter_from_string(const std::string& name) {
  if (name == "gaussian") return FilterKind::kGaussian;
  if (name == "heat") return FilterKind::kHeat;
  if (name == "tikhonov") return FilterKind::kTikhonov;
  throw ValidationError(
      "generator.filter must be gaussian, heat, or tikhonov (got '" + name +
      "')");
}

std::string filter_to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::kGaussian: return "gaussian";
    case FilterKind::kHeat: return "heat";
    case FilterKind::kTikhonov: return "tikhonov";
  }
  return "heat";
}

}  // namespace

DatasetSpec dataset_spec_from_json(const json& section) {
  reject_unknown_keys(
      section,
      {"model", "n", "er_p", "ba_m", "rgg_sigma", "rgg_cutoff", "K", "d",
       "filter", "filter_alpha", "gaussian_mode", "num_hubs", "hub_indices",
       "bernoulli_p", "sharing", "noise_percent"},
      "generator");
  DatasetSpec spec;
  if (section.contains("model")) {
    spec.graph.kind = model_from_string(section.at("model").get<std::string>());
  }
  if (section.contains("n")) spec.graph.n = section.at("n").get<Index>();
  if (section.contains("er_p")) spec.graph.er_p = section.at("er_p").get<double>();
  if (section.contains("ba_m")) spec.graph.ba_m = section.at("ba_m").get<int>();
  if (section.contains("rgg_sigma")) {
    spec.graph.rgg_sigma = section.at("rgg_sigma").get<double>();
  }
  if (section.contains("rgg_cutoff")) {
    spec.graph.rgg_cutoff = section.at("rgg_cutoff").get<double>();
  }
  if (section.contains("K")) spec.num_views = section.at("K").get<int>();
  if (section.contains("d")) spec.samples_per_view = section.at("d").get<Index>();
  if (section.contains("filter")) {
    spec.filter.kind = filter_from_string(section.at("filter").get<std::string>());
  }
  if (section.contains("filter_alpha")) {
    spec.filter.alpha = section.at("filter_alpha").get<double>();
  }
  if (section.contains("gaussian_mode")) {
    const std::string mode = section.at("gaussian_mode").get<std::string>();
    if (mode == "literal") {
      spec.filter.gaussian_mode = GaussianMode::kLiteral;
    } else if (mode == "sqrt") {
      spec.filter.gaussian_mode = GaussianMode::kSqrt;
    } else {
      throw ValidationError("generator.gaussian_mode must be literal or sqrt");
    }
  }
  if (section.contains("num_hubs")) {
    spec.num_hubs = section.at("num_hubs").get<int>();
  }
  if (section.contains("hub_indices")) {
    spec.cohubs.hub_indices =
        section.at("hub_indices").get<std::vector<Index>>();
  }
  if (section.contains("bernoulli_p")) {
    spec.cohubs.bernoulli_p = section.at("bernoulli_p").get<double>();
  }
  if (section.contains("sharing")) {
    const std::string sharing = section.at("sharing").get<std::string>();
    if (sharing == "shared") {
      spec.cohubs.sharing = HubSharing::kShared;
    } else if (sharing == "independent") {
      spec.cohubs.sharing = HubSharing::kIndependent;
    } else {
      throw ValidationError("generator.sharing must be shared or independent");
    }
  }
  if (section.contains("noise_percent")) {
    spec.noise_percent = section.at("noise_percent").get<double>();
  }
  spec.validate();
  return spec;
}

json dataset_spec_to_json(const DatasetSpec& spec) {
  json section;
  section["model"] = model_to_string(spec.graph.kind);
  section["n"] = spec.graph.n;
  section["er_p"] = spec.graph.er_p;
  section["ba_m"] = spec.graph.ba_m;
  section["rgg_sigma"] = spec.graph.rgg_sigma;
  section["rgg_cutoff"] = spec.graph.rgg_cutoff;
  section["K"] = spec.num_views;
  section["d"] = spec.samples_per_view;
  section["filter"] = filter_to_string(spec.filter.kind);
  section["filter_alpha"] = spec.filter.alpha;
  section["gaussian_mode"] =
      spec.filter.gaussian_mode == GaussianMode::kLiteral ? "literal" : "sqrt";
  section["num_hubs"] = spec.num_hubs;
  if (!spec.cohubs.hub_indices.empty()) {
    section["hub_indices"] = spec.cohubs.hub_indices;
  }
  section["bernoulli_p"] = spec.cohubs.bernoulli_p;
  section["sharing"] =
      spec.cohubs.sharing == HubSharing::kShared ? "shared" : "independent";
  section["noise_percent"] = spec.noise_percent;
  return section;
}

SolverConfig solver_config_from_json(const json& section) {
  reject_unknown_keys(section,
                      {"gamma1", "gamma2", "gamma3", "gamma4", "alpha0", "mu",
                       "schedule", "alpha_cap", "max_iter", "tol",
                       "edge_threshold", "init", "init_seed"},
                      "solver");
  SolverConfig config;
  auto read = [&](const char* key, auto& field) {
    if (section.contains(key)) {
      field = section.at(key).get<std::decay_t<decltype(field)>>();
    }
  };
  read("gamma1", config.gamma1);
  read("gamma2", config.gamma2);
  read("gamma3", config.gamma3);
  read("gamma4", config.gamma4);
  read("alpha0", config.alpha0);
  read("mu", config.mu);
  read("alpha_cap", config.alpha_cap);
  read("max_iter", config.max_iter);
  read("tol", config.tol);
  read("init_seed", config.init_seed);
  if (section.contains("schedule")) {
    const std::string schedule = section.at("schedule").get<std::string>();
    if (schedule == "growing") {
      config.alpha_schedule = AlphaSchedule::kGrowing;
    } else if (schedule == "fixed") {
      config.alpha_schedule = AlphaSchedule::kFixed;
    } else {
      throw ValidationError("solver.schedule must be growing or fixed");
    }
  }
  if (section.contains("init")) {
    const std::string init = section.at("init").get<std::string>();
    if (init == "zeros") {
      config.init = InitMode::kZeros;
    } else if (init == "random") {
      config.init = InitMode::kRandom;
    } else {
      throw ValidationError("solver.init must be zeros or random");
    }
  }
  config.validate();
  return config;
}

json solver_config_to_json(const SolverConfig& config) {
  json section;
  section["gamma1"] = config.gamma1;
  section["gamma2"] = config.gamma2;
  section["gamma3"] = config.gamma3;
  section["gamma4"] = config.gamma4;
  section["alpha0"] = config.alpha0;
  section["mu"] = config.mu;
  section["schedule"] =
      config.alpha_schedule == AlphaSchedule::kGrowing ? "growing" : "fixed";
  section["alpha_cap"] = config.alpha_cap;
  section["max_iter"] = config.max_iter;
  section["tol"] = config.tol;
  return section;
}

double edge_threshold_from_json(const json& section) {
  if (section.contains("edge_threshold")) {
    const double threshold = section.at("edge_threshold").get<double>();
    if (threshold < 0.0 || threshold >= 1.0) {
      throw ValidationError("solver.edge_threshold must lie in [0, 1)");
    }
    return threshold;
  }
  return kDefaultEdgeThreshold;
}

std::vector<GammaTuple> grid_from_json(const json& section) {
  reject_unknown_keys(section, {"gamma1", "gamma2", "gamma3", "gamma4"},
                      "grid");
  auto axis = [&](const char* key, std::vector<double> fallback) {
    if (section.contains(key)) {
      const auto values = section.at(key).get<std::vector<double>>();
      if (values.empty()) {
        throw ValidationError(std::string("grid.") + key + " must be nonempty");
      }
      return values;
    }
    return fallback;
  };
  const std::vector<double> g1 = axis("gamma1", {1e-2, 1e-1, 1.0});
  const std::vector<double> g2 = axis("gamma2", {1e-1, 1.0, 10.0});
  const std::vector<double> g3 = axis("gamma3", {1e-2, 1e-1, 1.0});
  const std::vector<double> g4 = axis("gamma4", {1e-2, 1e-1, 1.0});
  std::vector<GammaTuple> grid;
  grid.reserve(g1.size() * g2.size() * g3.size() * g4.size());
  for (double a : g1)
    for (double b : g2)
      for (double c : g3)
        for (double d : g4) grid.push_back({a, b, c, d});
  return grid;
}

TunedSingleView learn_single_view_tuned(const Mat& raw_view) {
  const Mat normalized =
      raw_view / std::sqrt(static_cast<double>(raw_view.cols()));
  double best_score = std::numeric_limits<double>::infinity();
  std::optional<TunedSingleView> best;
  for (double alpha : {1e-4, 1e-3, 1e-2, 1e-1}) {
    SingleViewOptions options;
    options.alpha_sv = alpha;
    options.max_iter = 4000;
    SingleViewReport report = solve_single_view(normalized, options);
    const double score = view_nll(report.laplacian, raw_view);
    if (score < best_score) {
      best_score = score;
      best = TunedSingleView{std::move(report.laplacian), alpha};
    }
  }
  return *best;
}

double mean_edge_f1(const CoHubDecomposition& decomposition,
                    const std::vector<Mat>& truth_adjacencies,
                    double edge_threshold) {
  double total = 0.0;
  const int views = decomposition.num_views();
  for (int k = 0; k < views; ++k) {
    total += f1_edges(laplacian_from_adjacency(truth_adjacencies[k]),
                      decomposition.laplacians[k], edge_threshold);
  }
  return total / views;
}

BenchmarkOptions::BenchmarkOptions() {
  // Desk-scale defaults: n = 32 ER views with a heat filter mild enough
  // that the binary graphs stay detectable at this size.
  base.graph.n = 32;
  base.graph.er_p = 0.1;
  base.filter.kind = FilterKind::kHeat;
  base.filter.alpha = 1.0;
  base.num_views = 6;
  base.num_hubs = 1;
  base.samples_per_view = 500;
  base.noise_percent = 10.0;

  solver.gamma1 = 1e-3;
  solver.gamma2 = 1e-2;
  solver.gamma3 = 0.3;
  solver.gamma4 = 0.1;
  solver.max_iter = 600;
  solver.tol = 1e-5;

  for (double g2 : {3e-3, 1e-2, 3e-2}) {
    for (double g3 : {0.3, 1.0}) {
      gamma_grid.push_back({1e-3, g2, g3, 0.1});
    }
  }
}

namespace {

struct CellAccumulator {
  std::vector<double> ch, sv;
};

// One sweep cell: BIC-select gamma on the first realization, then score
// both methods on every realization. Realizations parallelize on
// stream-split seeds.
CellAccumulator run_cell(const BenchmarkOptions& options,
                         const DatasetSpec& spec, std::uint64_t cell_seed) {
  SolverConfig tuned = options.solver;
  {
    const SyntheticDataset first =
        make_dataset(spec, SplitMix64(cell_seed, 0).next_u64());
    const GridSearchResult bic =
        grid_search(MultiviewSignals(first.signals), options.gamma_grid,
                    options.solver, options.threads);
    tuned.gamma1 = bic.best().gamma[0];
    tuned.gamma2 = bic.best().gamma[1];
    tuned.gamma3 = bic.best().gamma[2];
    tuned.gamma4 = bic.best().gamma[3];
  }

  CellAccumulator acc;
  acc.ch.assign(options.realizations, std::nan(""));
  acc.sv.assign(options.realizations, std::nan(""));
  parallel_for(options.realizations, options.threads, [&](std::size_t r) {
    const SyntheticDataset data =
        make_dataset(spec, SplitMix64(cell_seed, r).next_u64());
    try {
      const SolveReport fit =
          solve(sample_normalized(MultiviewSignals(data.signals)), tuned);
      acc.ch[r] = mean_edge_f1(fit.decomposition, data.adjacencies);
    } catch (const DivergenceError&) {
      // leave NaN; aggregated below
    }
    double sv_total = 0.0;
    for (int k = 0; k < spec.num_views; ++k) {
      const TunedSingleView sv = learn_single_view_tuned(data.signals[k]);
      sv_total += f1_edges(laplacian_from_adjacency(data.adjacencies[k]),
                           sv.laplacian);
    }
    acc.sv[r] = sv_total / spec.num_views;
  });
  return acc;
}

std::pair<double, double> mean_std(const std::vector<double>& values) {
  double mean = 0.0;
  int count = 0;
  for (double v : values) {
    if (std::isfinite(v)) {
      mean += v;
      ++count;
    }
  }
  if (count == 0) return {std::nan(""), std::nan("")};
  mean /= count;
  double var = 0.0;
  for (double v : values) {
    if (std::isfinite(v)) var += (v - mean) * (v - mean);
  }
  return {mean, count > 1 ? std::sqrt(var / (count - 1)) : 0.0};
}

void append_cell(std::vector<SweepRow>& rows, const std::string& axis,
                 const std::string& label, const CellAccumulator& acc) {
  const auto [ch_mean, ch_std] = mean_std(acc.ch);
  const auto [sv_mean, sv_std] = mean_std(acc.sv);
  rows.push_back({axis, label, "CH-MVGL", ch_mean, ch_std});
  rows.push_back({axis, label, "SV", sv_mean, sv_std});
}

}  // namespace

std::vector<SweepRow> benchmark_views(const BenchmarkOptions& options,
                                      const std::vector<int>& k_values) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < k_values.size(); ++i) {
    DatasetSpec spec = options.base;
    spec.num_views = k_values[i];
    append_cell(rows, "K", std::to_string(k_values[i]),
                run_cell(options, spec, options.seed + 1000 * i));
  }
  return rows;
}

std::vector<SweepRow> benchmark_hubs(const BenchmarkOptions& options,
                                     const std::vector<int>& hub_counts) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < hub_counts.size(); ++i) {
    DatasetSpec spec = options.base;
    spec.num_hubs = hub_counts[i];
    append_cell(rows, "h", std::to_string(hub_counts[i]),
                run_cell(options, spec, options.seed + 1000 * i));
  }
  return rows;
}

std::vector<SweepRow> benchmark_noise(const BenchmarkOptions& options,
                                      const std::vector<double>& eta_values) {
  std::vector<SweepRow> rows;
  for (std::size_t i = 0; i < eta_values.size(); ++i) {
    DatasetSpec spec = options.base;
    spec.noise_percent = eta_values[i];
    char label[32];
    std::snprintf(label, sizeof label, "%g", eta_values[i]);
    append_cell(rows, "eta", label,
                run_cell(options, spec, options.seed + 1000 * i));
  }
  return rows;
}

std::vector<SweepRow> benchmark_models(const BenchmarkOptions& options) {
  std::vector<SweepRow> rows;
  std::size_t cell = 0;
  for (GraphModel model : {GraphModel::kErdosRenyi, GraphModel::kBarabasiAlbert,
                           GraphModel::kRandomGeometric}) {
    for (FilterKind filter :
         {FilterKind::kGaussian, FilterKind::kHeat, FilterKind::kTikhonov}) {
      DatasetSpec spec = options.base;
      spec.graph.kind = model;
      spec.filter.kind = filter;
      if (filter == FilterKind::kTikhonov) spec.filter.alpha = 20.0;
      if (filter == FilterKind::kHeat) spec.filter.alpha = 1.0;
      const std::string label = model_to_string(model) + std::string("_") +
                                filter_to_string(filter);
      append_cell(rows, "model_filter", label,
                  run_cell(options, spec, options.seed + 1000 * cell));
      ++cell;
    }
  }
  return rows;
}

std::vector<ScalabilityRow> benchmark_scalability(
    const BenchmarkOptions& options, const std::vector<Index>& n_values,
    const std::vector<int>& k_values) {
  std::vector<ScalabilityRow> rows;
  const int iters = 25;

  auto time_cell = [&](Index n, int views) {
    DatasetSpec spec = options.base;
    spec.graph.n = n;
    spec.num_views = views;
    spec.num_hubs = std::max<int>(1, static_cast<int>(n) / 32);
    spec.samples_per_view = 200;
    const SyntheticDataset data =
        make_dataset(spec, SplitMix64(options.seed, n * 131 + views).next_u64());
    const MultiviewSignals normalized =
        sample_normalized(MultiviewSignals(data.signals));
    SolverConfig cfg = options.solver;
    cfg.max_iter = iters;
    cfg.tol = 1e-14;  // run the full budget
    double ch_best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      solve(normalized, cfg);
      ch_best = std::min(
          ch_best, std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0).count() / iters);
    }
    // SV timed per full (tuned) learn over all views, reported per view.
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < views; ++k) learn_single_view_tuned(data.signals[k]);
    const double sv_total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count() /
        views;
    return std::pair<double, double>{ch_best, sv_total};
  };

  for (Index n : n_values) {
    const auto [ch, sv] = time_cell(n, options.base.num_views);
    rows.push_back({"n", static_cast<double>(n), "CH-MVGL", ch});
    rows.push_back({"n", static_cast<double>(n), "SV", sv});
  }
  for (int views : k_values) {
    const auto [ch, sv] = time_cell(64, views);
    rows.push_back({"K", static_cast<double>(views), "CH-MVGL", ch});
    rows.push_back({"K", static_cast<double>(views), "SV", sv});
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path,
                     const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << std::setprecision(17);
  if (!rows.empty()) {
    out << rows.front().axis << ",method,mean_f1,std_f1\n";
  }
  for (const SweepRow& row : rows) {
    out << row.label << ',' << row.method << ',' << row.mean << ','
        << row.stddev << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_scalability_csv(const std::filesystem::path& path,
                           const std::vector<ScalabilityRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << std::setprecision(17);
  if (!rows.empty()) {
    out << rows.front().axis << ",method,seconds_per_iter\n";
  }
  for (const ScalabilityRow& row : rows) {
    out << row.value << ',' << row.method << ',' << row.seconds_per_iter
        << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace chmvgl
