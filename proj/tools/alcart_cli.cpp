// alcart: command line front end for the active learning / dataset map harness.
//
//   alcart gen     --config gen.json  --out dir   -> dir/dataset.csv
//   alcart map     --config exp.json  --out dir   -> dir/map.csv, dir/map.svg
//   alcart run     --config exp.json  --out dir   -> dir/results/*.json, dir/aggregate.csv, dir/map.csv
//   alcart ablate  --config exp.json  --out dir   -> same layout, one run per removal fraction
//   alcart profile --config prof.json --out dir   -> dir/profiles.csv, dir/profile_*.svg
//   alcart report  --config rep.json  --out dir   -> curves, efficiency table, SVGs, manifest.json
//
// Exit status: 0 ok, 1 usage or config error, 2 runtime error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "alcart.hpp"

namespace fs = std::filesystem;
using namespace alcart;

namespace {

struct Options {
  std::string config;
  std::string out = "out";
  std::size_t parallel = 1;
  std::optional<std::uint64_t> seed;
};

nlohmann::json read_json(const fs::path& path) {
  const auto text = read_text_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

/// Relative paths inside a config are taken relative to the config file.
fs::path resolve(const fs::path& config, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : config.parent_path() / path;
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory", dir.string());
}

struct LoadedExperiment {
  ExperimentConfig cfg;
  std::vector<StrategyKind> strategies;
};

LoadedExperiment load_experiment(const Options& opt) {
  const fs::path path(opt.config);
  const auto j = read_json(path);
  LoadedExperiment le;
  try {
    le.cfg = j.get<ExperimentConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad experiment config " + path.string() + ": " + e.what());
  }
  if (!le.cfg.data.csv_path.empty()) le.cfg.data.csv_path = resolve(path, le.cfg.data.csv_path).string();
  if (opt.seed) le.cfg.replicates = {*opt.seed};
  if (le.cfg.replicates.empty()) throw ConfigError("replicates must not be empty");
  le.strategies = j.contains("strategies") ? le.cfg.strategies : std::vector<StrategyKind>{le.cfg.strategy.kind};
  return le;
}

void write_map_files(const DatasetMap& map, const Dataset& ds, const fs::path& dir) {
  std::ostringstream csv;
  write_map_csv(map, &ds.groups, csv);
  write_text_file(dir / "map.csv", csv.str());
  write_text_file(dir / "map.svg", map_scatter_svg(map, "dataset map"));
}

void write_results(const std::vector<ExperimentResult>& results, const fs::path& dir) {
  make_dir(dir / "results");
  for (const auto& r : results) save_result(r, dir / "results" / result_filename(r));
  std::ostringstream agg;
  write_aggregate_csv(results, agg);
  write_text_file(dir / "aggregate.csv", agg.str());
}

void run_suite(const Options& opt, const std::vector<double>& fractions, const LoadedExperiment& le) {
  const fs::path out(opt.out);
  make_dir(out);
  const auto ws = prepare_workspace(le.cfg);
  const auto map = build_reference_map(le.cfg, ws);
  write_map_files(map, ws.data, out);
  const auto jobs = make_jobs(le.strategies, fractions, le.cfg.replicates);
  std::size_t done = 0;
  const auto results = run_jobs(le.cfg, ws, jobs, &map, opt.parallel, [&](const ExperimentResult& r) {
    std::cerr << "[" << ++done << "/" << jobs.size() << "] " << r.strategy << " f=" << r.removal_fraction
              << " rep=" << r.replicate_seed << "\n";
  });
  write_results(results, out);
}

int cmd_gen(const Options& opt) {
  const auto j = read_json(opt.config);
  GeneratorConfig gc;
  try {
    gc = j.contains("dataset") ? j.at("dataset").at("generator").get<GeneratorConfig>() : j.get<GeneratorConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad generator config " + opt.config + ": " + e.what());
  }
  if (opt.seed) gc.rng_seed = *opt.seed;
  const auto ds = generate_synthetic(gc);
  make_dir(opt.out);
  std::ostringstream os;
  write_csv(ds, os);
  write_text_file(fs::path(opt.out) / "dataset.csv", os.str());
  return 0;
}

int cmd_map(const Options& opt) {
  const auto le = load_experiment(opt);
  const auto ws = prepare_workspace(le.cfg);
  const auto map = build_reference_map(le.cfg, ws);
  make_dir(opt.out);
  write_map_files(map, ws.data, opt.out);
  return 0;
}

int cmd_run(const Options& opt) {
  const auto le = load_experiment(opt);
  run_suite(opt, {le.cfg.removal_fraction}, le);
  return 0;
}

int cmd_ablate(const Options& opt) {
  const auto le = load_experiment(opt);
  if (le.cfg.removal_fractions.empty()) throw ConfigError("removal_fractions must not be empty");
  for (double f : le.cfg.removal_fractions)
    if (!(f >= 0.0 && f < 1.0)) throw ConfigError("removal fractions must lie in [0, 1)");
  run_suite(opt, le.cfg.removal_fractions, le);
  return 0;
}

std::vector<ExperimentResult> load_results_from(const fs::path& config, const nlohmann::json& j) {
  if (j.contains("results_dir")) return load_results_dir(resolve(config, j.at("results_dir").get<std::string>()));
  if (j.contains("results")) {
    std::vector<ExperimentResult> out;
    for (const auto& p : j.at("results")) out.push_back(load_result(resolve(config, p.get<std::string>())));
    return out;
  }
  throw ConfigError("config needs 'results_dir' or 'results'");
}

std::vector<AcquisitionProfile> profiles_for(const std::vector<ExperimentResult>& results, const DatasetMap& map) {
  std::vector<AcquisitionProfile> out;
  for (const auto& r : results) out.push_back(profile_acquisitions(r, map));
  return out;
}

int cmd_profile(const Options& opt) {
  const fs::path path(opt.config);
  const auto j = read_json(path);
  if (!j.contains("map")) throw ConfigError("profile config needs 'map'");
  const auto results = load_results_from(path, j);
  const auto map = load_map_csv(resolve(path, j.at("map").get<std::string>()).string());
  const auto profiles = profiles_for(results, map.map);
  const fs::path out(opt.out);
  make_dir(out);
  write_text_file(out / "profiles.csv", profiles_csv(profiles));
  for (const auto& p : profiles)
    write_text_file(out / ("profile_" + p.strategy + "_" + fraction_tag(p.removal_fraction) + "_rep" +
                           std::to_string(p.replicate_seed) + ".svg"),
                    bucket_bars_svg(p));
  return 0;
}

int cmd_report(const Options& opt) {
  const fs::path path(opt.config);
  const auto j = read_json(path);
  const auto results = load_results_from(path, j);
  if (results.empty()) throw UsageError("no results to report");
  const auto curves = aggregate_curves(results);

  std::optional<double> target;
  if (j.contains("target_accuracy") && !j.at("target_accuracy").is_null())
    target = j.at("target_accuracy").get<double>();
  else
    target = default_target_accuracy(results);
  std::vector<EfficiencyRow> efficiency;
  if (target) efficiency = efficiency_table(curves, *target);
  else std::cerr << "warning: no target accuracy available; skipping sample efficiency\n";

  std::optional<MapCsv> map;
  std::vector<NamedMap> maps;
  std::vector<AcquisitionProfile> profiles;
  if (j.contains("map")) {
    map = load_map_csv(resolve(path, j.at("map").get<std::string>()).string());
    profiles = profiles_for(results, map->map);
    maps.push_back({"reference", &map->map, nullptr});
  }
  emit_artifacts(curves, maps, profiles, opt.out, efficiency);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pool-based active learning benchmark with dataset maps"};
  app.require_subcommand(1, 1);
  Options opt;

  auto add = [&](const char* name, const char* help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON config file")->required();
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--parallel", opt.parallel, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--seed", opt.seed, "single replicate seed overriding the config");
    return sub;
  };
  auto* gen = add("gen", "generate a synthetic dataset CSV");
  auto* map = add("map", "train on the full split and export the reference dataset map");
  auto* run = add("run", "run active learning for every configured strategy");
  auto* profile = add("profile", "bucket histograms of acquisitions per iteration");
  auto* ablate = add("ablate", "run every strategy on pools with outliers removed");
  auto* report = add("report", "aggregate results into curves, efficiency table and plots");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    if (argc <= 1) std::cerr << app.help();
    return 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(opt);
    if (map->parsed()) return cmd_map(opt);
    if (run->parsed()) return cmd_run(opt);
    if (profile->parsed()) return cmd_profile(opt);
    if (ablate->parsed()) return cmd_ablate(opt);
    if (report->parsed()) return cmd_report(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
