#pragma once

// Pool-based active-learning experiments: holdout and seed/pool splits,
// iterative acquire-and-retrain loops, reference Dataset Maps, acquisition
// profiles and outlier-ablation sweeps.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "acquisition.hpp"
#include "cartography.hpp"
#include "datagen.hpp"
#include "error.hpp"
#include "model.hpp"

namespace alcart {

struct DatasetSource {
  std::optional<GeneratorConfig> generator;
  std::string csv_path;
  std::optional<int> num_classes;
};

struct ExperimentConfig {
  DatasetSource data;
  double validation_fraction = 0.2;
  std::uint64_t split_seed = 0;
  std::uint64_t map_seed = 0;
  ModelSpec model;
  TrainConfig train;
  AcquisitionStrategy strategy;
  double seed_fraction = 0.1;
  double batch_fraction = 0.1;
  /// Cap on acquisition iterations; unset runs until the pool is empty.
  std::optional<std::size_t> max_iterations;
  double removal_fraction = 0.0;
  OutlierScoreRule outlier_rule = OutlierScoreRule::product;
  std::vector<std::uint64_t> replicates{1, 2, 3, 4, 5};

  // Suite-level settings, used by the CLI and run_ablation_suite.
  std::vector<StrategyKind> strategies{StrategyKind::random};
  std::vector<double> removal_fractions{0.10, 0.25, 0.50};
  std::optional<double> target_accuracy;

  void validate() const {
    if (!data.generator && data.csv_path.empty()) throw ConfigError("dataset source missing (generator or csv)");
    if (data.generator) data.generator->validate();
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
      throw ConfigError("validation_fraction must lie in (0, 1)");
    if (!(seed_fraction > 0.0 && seed_fraction < 1.0)) throw ConfigError("seed_fraction must lie in (0, 1)");
    if (!(batch_fraction > 0.0 && batch_fraction <= 1.0)) throw ConfigError("batch_fraction must lie in (0, 1]");
    if (!(removal_fraction >= 0.0 && removal_fraction < 1.0)) throw ConfigError("removal_fraction must lie in [0, 1)");
    for (double f : removal_fractions)
      if (!(f >= 0.0 && f < 1.0)) throw ConfigError("removal_fractions must lie in [0, 1)");
    if (replicates.empty()) throw ConfigError("replicate list must be non-empty");
    if (strategies.empty()) throw ConfigError("strategy list must be non-empty");
    train.validate();
    strategy.validate();
  }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  nlohmann::json data;
  if (c.data.generator) data["generator"] = *c.data.generator;
  if (!c.data.csv_path.empty()) data["csv"] = c.data.csv_path;
  if (c.data.num_classes) data["num_classes"] = *c.data.num_classes;
  nlohmann::json model = c.model;
  model.erase("vision_dims");
  model.erase("language_dims");
  model.erase("num_classes");
  model.erase("rng_seed");
  nlohmann::json train = c.train;
  train.erase("rng_seed");
  std::vector<std::string> strategies;
  for (auto s : c.strategies) strategies.emplace_back(strategy_name(s));
  j = nlohmann::json{
      {"dataset", data},
      {"validation_fraction", c.validation_fraction},
      {"split_seed", c.split_seed},
      {"map_seed", c.map_seed},
      {"model", model},
      {"train", train},
      {"acquisition",
       {{"k_passes", c.strategy.k_passes},
        {"coreset_mode", c.strategy.coreset_mode == CoresetMode::exact ? "exact" : "amortized"},
        {"pca_dims", c.strategy.pca_dims},
        {"refresh_interval", c.strategy.refresh_interval}}},
      {"strategy", strategy_name(c.strategy.kind)},
      {"strategies", strategies},
      {"seed_fraction", c.seed_fraction},
      {"batch_fraction", c.batch_fraction},
      {"max_iterations", c.max_iterations ? nlohmann::json(*c.max_iterations) : nlohmann::json(nullptr)},
      {"removal_fraction", c.removal_fraction},
      {"removal_fractions", c.removal_fractions},
      {"outlier_score", c.outlier_rule == OutlierScoreRule::product ? "product" : "corner_distance"},
      {"replicates", c.replicates},
      {"target_accuracy", c.target_accuracy ? nlohmann::json(*c.target_accuracy) : nlohmann::json(nullptr)}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  const auto& data = j.at("dataset");
  if (data.contains("generator")) c.data.generator = data.at("generator").get<GeneratorConfig>();
  c.data.csv_path = data.value("csv", std::string{});
  if (data.contains("num_classes")) c.data.num_classes = data.at("num_classes").get<int>();
  c.validation_fraction = j.value("validation_fraction", c.validation_fraction);
  c.split_seed = j.value("split_seed", c.split_seed);
  c.map_seed = j.value("map_seed", c.map_seed);
  if (j.contains("model")) c.model = j.at("model").get<ModelSpec>();
  if (j.contains("train")) c.train = j.at("train").get<TrainConfig>();
  if (j.contains("acquisition")) {
    const auto& a = j.at("acquisition");
    c.strategy.k_passes = a.value("k_passes", c.strategy.k_passes);
    const auto mode = a.value("coreset_mode", std::string("exact"));
    if (mode != "exact" && mode != "amortized") throw ConfigError("coreset_mode must be 'exact' or 'amortized'");
    c.strategy.coreset_mode = mode == "exact" ? CoresetMode::exact : CoresetMode::amortized;
    c.strategy.pca_dims = a.value("pca_dims", c.strategy.pca_dims);
    c.strategy.refresh_interval = a.value("refresh_interval", c.strategy.refresh_interval);
  }
  if (j.contains("strategies")) {
    c.strategies.clear();
    for (const auto& s : j.at("strategies")) c.strategies.push_back(parse_strategy(s.get<std::string>()));
  }
  if (j.contains("strategy")) c.strategy.kind = parse_strategy(j.at("strategy").get<std::string>());
  else if (!c.strategies.empty()) c.strategy.kind = c.strategies.front();
  c.seed_fraction = j.value("seed_fraction", c.seed_fraction);
  c.batch_fraction = j.value("batch_fraction", c.batch_fraction);
  if (j.contains("max_iterations") && !j.at("max_iterations").is_null())
    c.max_iterations = j.at("max_iterations").get<std::size_t>();
  c.removal_fraction = j.value("removal_fraction", c.removal_fraction);
  if (j.contains("removal_fractions")) c.removal_fractions = j.at("removal_fractions").get<std::vector<double>>();
  const auto rule = j.value("outlier_score", std::string("product"));
  if (rule != "product" && rule != "corner_distance") throw ConfigError("outlier_score must be product|corner_distance");
  c.outlier_rule = rule == "product" ? OutlierScoreRule::product : OutlierScoreRule::corner_distance;
  if (j.contains("replicates")) c.replicates = j.at("replicates").get<std::vector<std::uint64_t>>();
  if (j.contains("target_accuracy") && !j.at("target_accuracy").is_null())
    c.target_accuracy = j.at("target_accuracy").get<double>();
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open config", path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(is);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON in ") + path + ": " + e.what(), 0);
  }
  try {
    return j.get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad experiment config ") + path + ": " + e.what());
  }
}

/// Dataset plus the fixed validation holdout shared by every run of a config.
struct Workspace {
  Dataset data;
  HoldoutSplit split;
};

inline Workspace prepare_workspace(const ExperimentConfig& cfg) {
  cfg.validate();
  Workspace ws;
  ws.data = cfg.data.generator ? generate_synthetic(*cfg.data.generator) : load_csv(cfg.data.csv_path, cfg.data.num_classes);
  ws.data.validate();
  ws.split = stratified_holdout(ws.data, cfg.validation_fraction, cfg.split_seed);
  return ws;
}

/// Seed streams for one replicate.
struct RunSeeds {
  std::uint64_t replicate;
  std::uint64_t split() const { return derive_seed(replicate, 1); }
  std::uint64_t init(std::size_t iteration) const { return derive_seed(replicate, 2, iteration); }
  std::uint64_t train(std::size_t iteration) const { return derive_seed(replicate, 3, iteration); }
  std::uint64_t acquire(std::size_t iteration) const { return derive_seed(replicate, 4, iteration); }
  std::uint64_t full_init() const { return derive_seed(replicate, 5); }
  std::uint64_t full_train() const { return derive_seed(replicate, 6); }
};

/// Fresh model trained on `rows` with explicit init/training seeds.
inline Model train_fresh(const ExperimentConfig& cfg, const Dataset& ds, const IndexSet& rows, std::uint64_t init_seed,
                         std::uint64_t train_seed) {
  ModelSpec spec = cfg.model.with_layout(ds);
  spec.rng_seed = init_seed;
  TrainConfig tc = cfg.train;
  tc.rng_seed = train_seed;
  return train(init_model(spec), ds, rows, tc).model;
}

/// Trains once on every non-validation example, logging dynamics over all of
/// them, and builds the map from those dynamics.
inline DatasetMap build_reference_map(const ExperimentConfig& cfg, const Workspace& ws) {
  ModelSpec spec = cfg.model.with_layout(ws.data);
  spec.rng_seed = derive_seed(cfg.map_seed, 101);
  TrainConfig tc = cfg.train;
  tc.rng_seed = derive_seed(cfg.map_seed, 102);
  auto res = train(init_model(spec), ws.data, ws.split.train, tc, &ws.split.train);
  return compute_map(*res.dynamics, cfg.outlier_rule);
}

inline DatasetMap build_reference_map(const ExperimentConfig& cfg) {
  return build_reference_map(cfg, prepare_workspace(cfg));
}

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t labeled_size = 0;
  double val_accuracy = 0.0;
  /// Examples acquired after this iteration's evaluation.
  IndexSet acquired;
  std::optional<BucketCounts> acquired_buckets;
  /// Not serialized: results files must be byte-reproducible.
  double wall_seconds = 0.0;
};

struct ExperimentResult {
  std::string strategy;
  double removal_fraction = 0.0;
  std::uint64_t replicate_seed = 0;
  std::size_t seed_size = 0;
  std::size_t batch_size = 0;
  std::size_t removed = 0;
  IndexSet initial_pool;
  std::optional<BucketCounts> pool_buckets;
  /// One-shot accuracy of a model trained on every non-validation example.
  std::optional<double> full_data_accuracy;
  std::vector<IterationRecord> iterations;
  nlohmann::json config;
};

struct RunOptions {
  const DatasetMap* map = nullptr;
  bool compute_full_data_accuracy = true;
};

/// One replicate of one strategy. When `opts.map` is given, acquisitions are
/// bucketed against it, and it drives pool ablation if removal_fraction > 0.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const Workspace& ws, std::uint64_t replicate,
                                       const RunOptions& opts = {}) {
  cfg.validate();
  const Dataset& ds = ws.data;
  const RunSeeds seeds{replicate};
  auto split = split_seed_pool(ws.split.train, cfg.seed_fraction, seeds.split());

  ExperimentResult result;
  result.strategy = std::string(strategy_name(cfg.strategy.kind));
  result.removal_fraction = cfg.removal_fraction;
  result.replicate_seed = replicate;
  result.config = cfg;
  result.config["strategy"] = result.strategy;
  result.config["removal_fraction"] = cfg.removal_fraction;

  IndexSet pool = split.pool;
  if (cfg.removal_fraction > 0.0) {
    if (!opts.map) throw UsageError("pool ablation needs a reference map");
    pool = ablate_pool(pool, *opts.map, cfg.removal_fraction);
  }
  result.removed = split.pool.size() - pool.size();
  result.seed_size = split.seed.size();
  result.initial_pool = pool;
  if (opts.map) result.pool_buckets = bucket_histogram(*opts.map, pool);
  if (pool.empty()) throw ConfigError("pool is empty after splitting/ablation");
  const auto b = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.batch_fraction * static_cast<double>(pool.size()))));
  result.batch_size = b;

  if (opts.compute_full_data_accuracy) {
    const Model full = train_fresh(cfg, ds, ws.split.train, seeds.full_init(), seeds.full_train());
    result.full_data_accuracy = accuracy(full, ds, ws.split.validation);
  }

  IndexSet labeled = split.seed;
  for (std::size_t t = 0;; ++t) {
    const auto start = std::chrono::steady_clock::now();
    IterationRecord rec;
    rec.iteration = t;
    rec.labeled_size = labeled.size();
    const Model model = train_fresh(cfg, ds, labeled, seeds.init(t), seeds.train(t));
    rec.val_accuracy = accuracy(model, ds, ws.split.validation);

    const bool done = pool.empty() || (cfg.max_iterations && t >= *cfg.max_iterations);
    if (!done) {
      auto batch = select_batch(cfg.strategy, model, ds, labeled, pool, b, seeds.acquire(t));
      rec.acquired = batch.indices;
      if (opts.map) rec.acquired_buckets = bucket_histogram(*opts.map, rec.acquired);
      IndexSet picked = batch.indices;
      std::sort(picked.begin(), picked.end());
      IndexSet rest;
      rest.reserve(pool.size() - picked.size());
      std::set_difference(pool.begin(), pool.end(), picked.begin(), picked.end(), std::back_inserter(rest));
      pool = std::move(rest);
      labeled.insert(labeled.end(), picked.begin(), picked.end());
      std::sort(labeled.begin(), labeled.end());
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.iterations.push_back(std::move(rec));
    if (done) break;
  }
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const auto ws = prepare_workspace(cfg);
  const auto map = build_reference_map(cfg, ws);
  RunOptions opts;
  opts.map = &map;
  return run_experiment(cfg, ws, cfg.replicates.front(), opts);
}

// ---------------------------------------------------------------------------
// Acquisition profiles.

struct AcquisitionProfile {
  std::string strategy;
  double removal_fraction = 0.0;
  std::uint64_t replicate_seed = 0;
  /// Bucket counts of the pool before the first acquisition.
  BucketCounts pool_baseline{};
  std::vector<BucketCounts> per_iteration;
  std::vector<std::size_t> batch_sizes;
};

inline AcquisitionProfile profile_acquisitions(const ExperimentResult& result, const DatasetMap& map) {
  AcquisitionProfile p;
  p.strategy = result.strategy;
  p.removal_fraction = result.removal_fraction;
  p.replicate_seed = result.replicate_seed;
  p.pool_baseline = bucket_histogram(map, result.initial_pool);
  for (const auto& it : result.iterations) {
    if (it.acquired.empty()) continue;
    p.per_iteration.push_back(bucket_histogram(map, it.acquired));
    p.batch_sizes.push_back(it.acquired.size());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Suites.

struct RunJob {
  StrategyKind strategy;
  double removal_fraction;
  std::uint64_t replicate;
};

/// Runs jobs on up to `parallel` worker threads; results keep job order.
inline std::vector<ExperimentResult> run_jobs(const ExperimentConfig& base, const Workspace& ws,
                                              const std::vector<RunJob>& jobs, const DatasetMap* map,
                                              std::size_t parallel = 1,
                                              const std::function<void(const ExperimentResult&)>& on_done = {}) {
  std::vector<std::optional<ExperimentResult>> slots(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::size_t next = 0;
  std::mutex mu;
  auto worker = [&] {
    while (true) {
      std::size_t i = 0;
      {
        std::lock_guard lock(mu);
        if (next >= jobs.size()) return;
        i = next++;
      }
      try {
        ExperimentConfig cfg = base;
        cfg.strategy.kind = jobs[i].strategy;
        cfg.removal_fraction = jobs[i].removal_fraction;
        RunOptions opts;
        opts.map = map;
        slots[i] = run_experiment(cfg, ws, jobs[i].replicate, opts);
        if (on_done) {
          std::lock_guard lock(mu);
          on_done(*slots[i]);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  parallel = std::max<std::size_t>(1, std::min(parallel, jobs.size()));
  if (parallel == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t t = 0; t < parallel; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<ExperimentResult> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline std::vector<RunJob> make_jobs(const std::vector<StrategyKind>& strategies, const std::vector<double>& fractions,
                                     const std::vector<std::uint64_t>& replicates) {
  std::vector<RunJob> jobs;
  for (double f : fractions)
    for (auto s : strategies)
      for (auto r : replicates) jobs.push_back({s, f, r});
  return jobs;
}

/// Builds one reference map, then runs every (fraction, strategy, replicate).
inline std::vector<ExperimentResult> run_ablation_suite(const ExperimentConfig& cfg, const std::vector<double>& fractions,
                                                        std::size_t parallel = 1) {
  for (double f : fractions)
    if (!(f >= 0.0 && f < 1.0)) throw ConfigError("removal fractions must lie in [0, 1)");
  const auto ws = prepare_workspace(cfg);
  const auto map = build_reference_map(cfg, ws);
  return run_jobs(cfg, ws, make_jobs(cfg.strategies, fractions, cfg.replicates), &map, parallel);
}

// ---------------------------------------------------------------------------
// Persistence.

inline nlohmann::json buckets_json(const BucketCounts& c) {
  nlohmann::json j = nlohmann::json::object();
  for (auto b : kBuckets) j[std::string(bucket_name(b))] = c[static_cast<std::size_t>(b)];
  return j;
}

inline BucketCounts buckets_from_json(const nlohmann::json& j) {
  BucketCounts c{};
  for (auto b : kBuckets) c[static_cast<std::size_t>(b)] = j.at(std::string(bucket_name(b))).get<std::size_t>();
  return c;
}

inline nlohmann::json result_to_json(const ExperimentResult& r) {
  nlohmann::json iters = nlohmann::json::array();
  for (const auto& it : r.iterations) {
    nlohmann::json j{{"iteration", it.iteration},
                     {"labeled_size", it.labeled_size},
                     {"val_accuracy", it.val_accuracy},
                     {"acquired", it.acquired}};
    if (it.acquired_buckets) j["acquired_buckets"] = buckets_json(*it.acquired_buckets);
    iters.push_back(std::move(j));
  }
  nlohmann::json j{{"strategy", r.strategy},
                   {"removal_fraction", r.removal_fraction},
                   {"replicate_seed", r.replicate_seed},
                   {"seed_size", r.seed_size},
                   {"batch_size", r.batch_size},
                   {"removed", r.removed},
                   {"initial_pool", r.initial_pool},
                   {"full_data_accuracy", r.full_data_accuracy ? nlohmann::json(*r.full_data_accuracy) : nlohmann::json(nullptr)},
                   {"iterations", iters},
                   {"config", r.config}};
  if (r.pool_buckets) j["pool_buckets"] = buckets_json(*r.pool_buckets);
  return j;
}

inline ExperimentResult result_from_json(const nlohmann::json& j) {
  ExperimentResult r;
  r.strategy = j.at("strategy").get<std::string>();
  r.removal_fraction = j.at("removal_fraction").get<double>();
  r.replicate_seed = j.at("replicate_seed").get<std::uint64_t>();
  r.seed_size = j.value("seed_size", std::size_t{0});
  r.batch_size = j.at("batch_size").get<std::size_t>();
  r.removed = j.value("removed", std::size_t{0});
  r.initial_pool = j.value("initial_pool", IndexSet{});
  if (j.contains("full_data_accuracy") && !j.at("full_data_accuracy").is_null())
    r.full_data_accuracy = j.at("full_data_accuracy").get<double>();
  if (j.contains("pool_buckets")) r.pool_buckets = buckets_from_json(j.at("pool_buckets"));
  for (const auto& it : j.at("iterations")) {
    IterationRecord rec;
    rec.iteration = it.at("iteration").get<std::size_t>();
    rec.labeled_size = it.at("labeled_size").get<std::size_t>();
    rec.val_accuracy = it.at("val_accuracy").get<double>();
    rec.acquired = it.value("acquired", IndexSet{});
    if (it.contains("acquired_buckets")) rec.acquired_buckets = buckets_from_json(it.at("acquired_buckets"));
    r.iterations.push_back(std::move(rec));
  }
  r.config = j.value("config", nlohmann::json::object());
  return r;
}

inline std::string result_filename(const ExperimentResult& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s_f%.2f_rep%llu.json", r.strategy.c_str(), r.removal_fraction,
                static_cast<unsigned long long>(r.replicate_seed));
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing", path.string());
  os << content;
  if (!os) throw IoError("write failed", path.string());
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open", path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void save_result(const ExperimentResult& r, const std::filesystem::path& path) {
  write_text_file(path, result_to_json(r).dump(1) + "\n");
}

inline ExperimentResult load_result(const std::filesystem::path& path) {
  try {
    return result_from_json(nlohmann::json::parse(read_text_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

/// Every *.json under `dir`, in filename order.
inline std::vector<ExperimentResult> load_results_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("not a directory", dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<ExperimentResult> out;
  for (const auto& f : files) out.push_back(load_result(f));
  return out;
}

/// Aggregate CSV: `strategy,removal_fraction,replicate,iteration,labeled_size,val_accuracy`.
inline void write_aggregate_csv(const std::vector<ExperimentResult>& results, std::ostream& os) {
  os << "strategy,removal_fraction,replicate,iteration,labeled_size,val_accuracy\n";
  for (const auto& r : results)
    for (const auto& it : r.iterations)
      os << r.strategy << ',' << detail::format_decimal(r.removal_fraction) << ',' << r.replicate_seed << ','
         << it.iteration << ',' << it.labeled_size << ',' << detail::format_decimal(it.val_accuracy) << '\n';
}

struct AggregateRow {
  std::string strategy;
  double removal_fraction = 0.0;
  std::uint64_t replicate = 0;
  std::size_t iteration = 0;
  std::size_t labeled_size = 0;
  double val_accuracy = 0.0;
  bool operator==(const AggregateRow&) const = default;
};

inline std::vector<AggregateRow> read_aggregate_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "strategy,removal_fraction,replicate,iteration,labeled_size,val_accuracy")
    throw ParseError("unexpected aggregate header", 1);
  std::vector<AggregateRow> rows;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = detail::split_commas(line);
    if (c.size() != 6) throw ParseError("expected 6 columns", line_no);
    AggregateRow r;
    r.strategy = std::string(c[0]);
    auto parse = [&](std::string_view s, auto& v) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || p != s.data() + s.size()) throw ParseError("bad value '" + std::string(s) + "'", line_no);
    };
    parse(c[1], r.removal_fraction);
    parse(c[2], r.replicate);
    parse(c[3], r.iteration);
    parse(c[4], r.labeled_size);
    parse(c[5], r.val_accuracy);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace alcart
