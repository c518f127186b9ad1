#pragma once

// Learning curves across replicates, sample-efficiency ratios and the
// deterministic CSV/SVG artifact set with its SHA-256 manifest.

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cartography.hpp"
#include "error.hpp"
#include "harness.hpp"
#include "svg.hpp"

namespace alcart {

struct CurvePoint {
  std::size_t labeled_size = 0;
  double mean = 0.0;
  /// Sample standard deviation across replicates (0 for a single replicate).
  double std = 0.0;
};

struct LearningCurve {
  std::string strategy;
  double removal_fraction = 0.0;
  std::size_t replicates = 0;
  std::vector<CurvePoint> points;
};

/// Pointwise mean/std over replicates, one curve per (removal fraction,
/// strategy), ordered by fraction then strategy name. Replicates are summed in
/// seed order so the output does not depend on input order.
inline std::vector<LearningCurve> aggregate_curves(const std::vector<ExperimentResult>& results) {
  std::map<std::pair<double, std::string>, std::vector<const ExperimentResult*>> groups;
  for (const auto& r : results) groups[{r.removal_fraction, r.strategy}].push_back(&r);

  std::vector<LearningCurve> curves;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(), [](auto* a, auto* b) { return a->replicate_seed < b->replicate_seed; });
    const auto& grid = members.front()->iterations;
    for (const auto* m : members) {
      bool same = m->iterations.size() == grid.size();
      for (std::size_t i = 0; same && i < grid.size(); ++i) same = m->iterations[i].labeled_size == grid[i].labeled_size;
      if (!same) throw UsageError("replicates of " + key.second + " have mismatched iteration grids");
    }
    LearningCurve c;
    c.removal_fraction = key.first;
    c.strategy = key.second;
    c.replicates = members.size();
    const auto n = static_cast<double>(members.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double sum = 0.0;
      for (const auto* m : members) sum += m->iterations[i].val_accuracy;
      const double mean = sum / n;
      double ss = 0.0;
      for (const auto* m : members) ss += (m->iterations[i].val_accuracy - mean) * (m->iterations[i].val_accuracy - mean);
      c.points.push_back({grid[i].labeled_size, mean, members.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0});
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

inline LearningCurve curve_of(const ExperimentResult& r) { return aggregate_curves({r}).front(); }

inline const LearningCurve* find_curve(const std::vector<LearningCurve>& curves, std::string_view strategy,
                                       double fraction) {
  for (const auto& c : curves)
    if (c.strategy == strategy && std::abs(c.removal_fraction - fraction) < 1e-12) return &c;
  return nullptr;
}

/// Trapezoidal area under the mean curve divided by the labeled-size span,
/// i.e. the average accuracy over the acquisition range.
inline double normalized_area(const LearningCurve& c) {
  if (c.points.empty()) throw UsageError("empty learning curve");
  if (c.points.size() == 1) return c.points.front().mean;
  double area = 0.0;
  for (std::size_t i = 1; i < c.points.size(); ++i)
    area += 0.5 * (c.points[i].mean + c.points[i - 1].mean) *
            static_cast<double>(c.points[i].labeled_size - c.points[i - 1].labeled_size);
  return area / static_cast<double>(c.points.back().labeled_size - c.points.front().labeled_size);
}

/// Smallest labeled size at which the linearly interpolated curve reaches
/// `target`; empty when it never does.
inline std::optional<double> examples_to_reach(const LearningCurve& c, double target) {
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& p = c.points[i];
    if (p.mean < target) continue;
    if (i == 0) return static_cast<double>(p.labeled_size);
    const auto& q = c.points[i - 1];
    const double t = (target - q.mean) / (p.mean - q.mean);
    return static_cast<double>(q.labeled_size) + t * static_cast<double>(p.labeled_size - q.labeled_size);
  }
  return std::nullopt;
}

struct SampleEfficiency {
  double target_accuracy = 0.0;
  std::optional<double> examples_needed_random;
  std::optional<double> examples_needed_strategy;
  /// random / strategy; empty when either curve misses the target.
  std::optional<double> ratio;

  bool defined() const { return ratio.has_value(); }
};

inline SampleEfficiency sample_efficiency(const LearningCurve& strategy, const LearningCurve& random,
                                          double target_accuracy) {
  SampleEfficiency s;
  s.target_accuracy = target_accuracy;
  s.examples_needed_random = examples_to_reach(random, target_accuracy);
  s.examples_needed_strategy = examples_to_reach(strategy, target_accuracy);
  if (s.examples_needed_random && s.examples_needed_strategy && *s.examples_needed_strategy > 0.0)
    s.ratio = *s.examples_needed_random / *s.examples_needed_strategy;
  return s;
}

/// 90% of the mean one-shot full-data accuracy recorded in the results.
inline std::optional<double> default_target_accuracy(const std::vector<ExperimentResult>& results) {
  std::map<std::uint64_t, double> per_replicate;
  for (const auto& r : results)
    if (r.full_data_accuracy) per_replicate[r.replicate_seed] = *r.full_data_accuracy;
  if (per_replicate.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [seed, acc] : per_replicate) sum += acc;
  return 0.9 * sum / static_cast<double>(per_replicate.size());
}

struct EfficiencyRow {
  std::string strategy;
  double removal_fraction = 0.0;
  SampleEfficiency efficiency;
};

/// Each non-random curve against the random curve of the same fraction.
inline std::vector<EfficiencyRow> efficiency_table(const std::vector<LearningCurve>& curves, double target) {
  std::vector<EfficiencyRow> rows;
  for (const auto& c : curves) {
    if (c.strategy == "random") continue;
    if (const auto* rnd = find_curve(curves, "random", c.removal_fraction))
      rows.push_back({c.strategy, c.removal_fraction, sample_efficiency(c, *rnd, target)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Artifacts.

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

struct ManifestEntry {
  std::string filename;
  std::string sha256;
};

struct NamedMap {
  std::string name;
  const DatasetMap* map = nullptr;
  const std::vector<Group>* groups = nullptr;
};

inline std::string fraction_tag(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "f%.2f", f);
  return buf;
}

inline std::string learning_curves_svg(const std::vector<const LearningCurve*>& curves, double fraction) {
  svg::Document doc(820, 480);
  svg::Frame f;
  double lo = 1.0, hi = 0.0;
  std::size_t xmax = 1;
  for (const auto* c : curves)
    for (const auto& p : c->points) {
      lo = std::min(lo, p.mean - p.std);
      hi = std::max(hi, p.mean + p.std);
      xmax = std::max(xmax, p.labeled_size);
    }
  if (curves.empty()) lo = 0.0, hi = 1.0;
  f.x_max = static_cast<double>(xmax);
  f.y_min = std::max(0.0, std::floor(lo * 20.0) / 20.0);
  f.y_max = std::min(1.0, std::ceil(hi * 20.0) / 20.0);
  if (f.y_max <= f.y_min) f.y_max = f.y_min + 0.05;
  f.draw_axes(doc, "learning curves, " + svg::num(fraction * 100.0) + "% of pool removed", "labeled examples",
              "validation accuracy");
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = *curves[i];
    std::vector<std::pair<double, double>> band, line;
    for (const auto& p : c.points) band.emplace_back(f.px(static_cast<double>(p.labeled_size)), f.py(p.mean + p.std));
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it)
      band.emplace_back(f.px(static_cast<double>(it->labeled_size)), f.py(it->mean - it->std));
    for (const auto& p : c.points) line.emplace_back(f.px(static_cast<double>(p.labeled_size)), f.py(p.mean));
    doc.polygon(band, svg::color(i), 0.15);
    doc.polyline(line, svg::color(i));
    doc.rect(650, 50 + 18.0 * static_cast<double>(i), 12, 12, svg::color(i));
    doc.text(668, 60 + 18.0 * static_cast<double>(i), c.strategy, 11);
  }
  return doc.str();
}

/// Stacked bars of acquired examples per bucket; bar height = batch size.
inline std::string bucket_bars_svg(const AcquisitionProfile& p) {
  svg::Document doc(760, 480);
  svg::Frame f;
  std::size_t tallest = 1;
  for (auto b : p.batch_sizes) tallest = std::max(tallest, b);
  f.x_max = static_cast<double>(std::max<std::size_t>(p.per_iteration.size(), 1));
  f.y_max = static_cast<double>(tallest);
  f.draw_axes(doc, p.strategy + " acquisitions by bucket", "acquisition iteration", "examples acquired");
  static constexpr std::string_view colors[] = {"#1a9850", "#91cf60", "#fc8d59", "#d73027"};
  const double slot = f.width / f.x_max;
  for (std::size_t i = 0; i < p.per_iteration.size(); ++i) {
    double base = 0.0;
    for (auto b : kBuckets) {
      const auto count = static_cast<double>(p.per_iteration[i][static_cast<std::size_t>(b)]);
      if (count > 0)
        doc.rect(f.left + slot * static_cast<double>(i) + slot * 0.1, f.py(base + count), slot * 0.8,
                 f.py(base) - f.py(base + count), colors[static_cast<std::size_t>(b)]);
      base += count;
    }
  }
  for (auto b : kBuckets) {
    const auto k = static_cast<double>(static_cast<std::size_t>(b));
    doc.rect(645, 50 + 18.0 * k, 12, 12, colors[static_cast<std::size_t>(b)]);
    doc.text(663, 60 + 18.0 * k, bucket_name(b), 11);
  }
  return doc.str();
}

inline std::string curves_csv(const std::vector<LearningCurve>& curves) {
  std::ostringstream os;
  os << "strategy,removal_fraction,labeled_size,mean_accuracy,std_accuracy\n";
  for (const auto& c : curves)
    for (const auto& p : c.points)
      os << c.strategy << ',' << detail::format_decimal(c.removal_fraction) << ',' << p.labeled_size << ','
         << detail::format_decimal(p.mean) << ',' << detail::format_decimal(p.std) << '\n';
  return os.str();
}

/// Inverse of curves_csv.
inline std::vector<LearningCurve> read_curves_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "strategy,removal_fraction,labeled_size,mean_accuracy,std_accuracy")
    throw ParseError("unexpected curves header", 1);
  std::vector<LearningCurve> curves;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = detail::split_commas(line);
    if (c.size() != 5) throw ParseError("expected 5 columns", line_no);
    double frac = 0.0;
    CurvePoint p;
    auto parse = [&](std::string_view s, auto& v) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("bad value '" + std::string(s) + "'", line_no);
    };
    parse(c[1], frac);
    parse(c[2], p.labeled_size);
    parse(c[3], p.mean);
    parse(c[4], p.std);
    if (curves.empty() || curves.back().strategy != c[0] || curves.back().removal_fraction != frac)
      curves.push_back({std::string(c[0]), frac, 0, {}});
    curves.back().points.push_back(p);
  }
  return curves;
}

inline std::string profiles_csv(const std::vector<AcquisitionProfile>& profiles) {
  std::ostringstream os;
  os << "strategy,removal_fraction,replicate,iteration,easy,medium,hard,impossible\n";
  for (const auto& p : profiles) {
    auto row = [&](const std::string& it, const BucketCounts& c) {
      os << p.strategy << ',' << detail::format_decimal(p.removal_fraction) << ',' << p.replicate_seed << ',' << it;
      for (auto v : c) os << ',' << v;
      os << '\n';
    };
    row("pool", p.pool_baseline);
    for (std::size_t i = 0; i < p.per_iteration.size(); ++i) row(std::to_string(i), p.per_iteration[i]);
  }
  return os.str();
}

inline std::string efficiency_csv(const std::vector<EfficiencyRow>& rows) {
  std::ostringstream os;
  os << "strategy,removal_fraction,target_accuracy,examples_needed_random,examples_needed_strategy,ratio\n";
  auto opt = [](const std::optional<double>& v) { return v ? detail::format_decimal(*v) : std::string("undefined"); };
  for (const auto& r : rows)
    os << r.strategy << ',' << detail::format_decimal(r.removal_fraction) << ','
       << detail::format_decimal(r.efficiency.target_accuracy) << ',' << opt(r.efficiency.examples_needed_random) << ','
       << opt(r.efficiency.examples_needed_strategy) << ',' << opt(r.efficiency.ratio) << '\n';
  return os.str();
}

/// Writes every artifact into `out_dir` plus `manifest.json`, a list of
/// {filename, sha256} entries for the other files. Returns the manifest.
inline std::vector<ManifestEntry> emit_artifacts(const std::vector<LearningCurve>& curves,
                                                 const std::vector<NamedMap>& maps,
                                                 const std::vector<AcquisitionProfile>& profiles,
                                                 const std::filesystem::path& out_dir,
                                                 const std::vector<EfficiencyRow>& efficiency = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory", out_dir.string());

  std::vector<ManifestEntry> manifest;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_text_file(out_dir / name, content);
    manifest.push_back({name, sha256_hex(content)});
  };

  emit("curves.csv", curves_csv(curves));
  std::map<double, std::vector<const LearningCurve*>> by_fraction;
  for (const auto& c : curves) by_fraction[c.removal_fraction].push_back(&c);
  for (const auto& [fraction, group] : by_fraction)
    emit("learning_curves_" + fraction_tag(fraction) + ".svg", learning_curves_svg(group, fraction));

  if (!efficiency.empty()) emit("sample_efficiency.csv", efficiency_csv(efficiency));

  for (const auto& m : maps) {
    std::ostringstream csv;
    write_map_csv(*m.map, m.groups, csv);
    emit("map_" + m.name + ".csv", csv.str());
    emit("map_" + m.name + ".svg", map_scatter_svg(*m.map, "dataset map: " + m.name));
  }

  if (!profiles.empty()) {
    emit("profiles.csv", profiles_csv(profiles));
    for (const auto& p : profiles)
      emit("profile_" + p.strategy + "_" + fraction_tag(p.removal_fraction) + "_rep" + std::to_string(p.replicate_seed) +
               ".svg",
           bucket_bars_svg(p));
  }

  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : manifest) j.push_back({{"filename", e.filename}, {"sha256", e.sha256}});
  write_text_file(out_dir / "manifest.json", j.dump(1) + "\n");
  return manifest;
}

}  // namespace alcart
