#pragma once

// Dataset Maps: per-example mean gold-label confidence and its variability
// over training epochs, difficulty buckets, outlier scores and pool ablation.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "datagen.hpp"
#include "error.hpp"
#include "model.hpp"
#include "svg.hpp"

namespace alcart {

enum class Bucket { easy = 0, medium = 1, hard = 2, impossible = 3 };

inline constexpr std::array<Bucket, 4> kBuckets{Bucket::easy, Bucket::medium, Bucket::hard, Bucket::impossible};

inline std::string_view bucket_name(Bucket b) {
  switch (b) {
    case Bucket::easy: return "easy";
    case Bucket::medium: return "medium";
    case Bucket::hard: return "hard";
    case Bucket::impossible: return "impossible";
  }
  return "?";
}

inline std::optional<Bucket> parse_bucket(std::string_view s) {
  for (auto b : kBuckets)
    if (bucket_name(b) == s) return b;
  return std::nullopt;
}

/// Thresholds on mean confidence: easy >= 0.75, medium >= 0.50, hard >= 0.25.
inline Bucket bucket_of(double mu) {
  if (mu >= 0.75) return Bucket::easy;
  if (mu >= 0.50) return Bucket::medium;
  if (mu >= 0.25) return Bucket::hard;
  return Bucket::impossible;
}

enum class OutlierScoreRule {
  /// mu * sigma.
  product,
  /// sqrt(mu^2 + sigma^2); alternative ranking, not the default.
  corner_distance,
};

inline double outlier_score(double mu, double sigma, OutlierScoreRule rule) {
  return rule == OutlierScoreRule::product ? mu * sigma : std::sqrt(mu * mu + sigma * sigma);
}

using BucketCounts = std::array<std::size_t, 4>;

/// Rows are sorted by example index.
struct DatasetMap {
  IndexSet examples;
  std::vector<double> mu;
  std::vector<double> sigma;
  std::vector<double> correctness;
  std::vector<Bucket> bucket;
  std::vector<double> outlier_score;

  std::size_t size() const { return examples.size(); }

  std::optional<std::size_t> row_of(std::size_t example) const {
    auto it = std::lower_bound(examples.begin(), examples.end(), example);
    if (it == examples.end() || *it != example) return std::nullopt;
    return static_cast<std::size_t>(it - examples.begin());
  }

  std::size_t require_row(std::size_t example) const {
    auto r = row_of(example);
    if (!r) throw UsageError("example " + std::to_string(example) + " is not covered by the dataset map");
    return *r;
  }
};

inline DatasetMap compute_map(const TrainingDynamics& dyn, OutlierScoreRule rule = OutlierScoreRule::product) {
  const auto epochs = static_cast<Eigen::Index>(dyn.epochs());
  if (epochs < 2) throw UsageError("dataset map needs dynamics from at least two epochs");
  const auto n = dyn.examples.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return dyn.examples[a] < dyn.examples[b]; });

  DatasetMap map;
  map.examples.reserve(n);
  for (auto r : order) {
    const auto row = static_cast<Eigen::Index>(r);
    const double mean = dyn.gold_confidence.row(row).mean();
    double var = 0.0;
    for (Eigen::Index e = 0; e < epochs; ++e) {
      const double d = dyn.gold_confidence(row, e) - mean;
      var += d * d;
    }
    const double sd = std::sqrt(var / static_cast<double>(epochs));
    const double corr = static_cast<double>(dyn.correct.row(row).count()) / static_cast<double>(epochs);
    map.examples.push_back(dyn.examples[r]);
    map.mu.push_back(mean);
    map.sigma.push_back(sd);
    map.correctness.push_back(corr);
    map.bucket.push_back(bucket_of(mean));
    map.outlier_score.push_back(outlier_score(mean, sd, rule));
  }
  if (std::adjacent_find(map.examples.begin(), map.examples.end()) != map.examples.end())
    throw UsageError("training dynamics list an example twice");
  return map;
}

/// Example indices in ascending outlier score; ties by ascending index.
inline IndexSet rank_by_outlier_score(const DatasetMap& map) {
  std::vector<std::size_t> rows(map.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  std::stable_sort(rows.begin(), rows.end(), [&](auto a, auto b) {
    if (map.outlier_score[a] != map.outlier_score[b]) return map.outlier_score[a] < map.outlier_score[b];
    return map.examples[a] < map.examples[b];
  });
  IndexSet out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(map.examples[r]);
  return out;
}

/// Drops the floor(fraction * |pool|) pool members with the lowest outlier
/// score. Returns the remaining pool, sorted.
inline IndexSet ablate_pool(const IndexSet& pool, const DatasetMap& map, double removal_fraction) {
  if (!(removal_fraction >= 0.0 && removal_fraction < 1.0)) throw ConfigError("removal_fraction must lie in [0, 1)");
  std::vector<std::size_t> rows;
  rows.reserve(pool.size());
  for (auto p : pool) rows.push_back(map.require_row(p));
  std::sort(rows.begin(), rows.end(), [&](auto a, auto b) {
    if (map.outlier_score[a] != map.outlier_score[b]) return map.outlier_score[a] < map.outlier_score[b];
    return map.examples[a] < map.examples[b];
  });
  const auto drop = static_cast<std::size_t>(std::floor(removal_fraction * static_cast<double>(pool.size())));
  IndexSet kept;
  for (std::size_t i = drop; i < rows.size(); ++i) kept.push_back(map.examples[rows[i]]);
  std::sort(kept.begin(), kept.end());
  return kept;
}

inline BucketCounts bucket_histogram(const DatasetMap& map, const IndexSet& indices) {
  BucketCounts counts{};
  for (auto i : indices) ++counts[static_cast<std::size_t>(map.bucket[map.require_row(i)])];
  return counts;
}

// ---------------------------------------------------------------------------
// Export: CSV `index,mu,sigma,correctness,bucket,outlier_score,group` and an
// SVG scatter (x = variability, y = mean confidence, color = correctness).

inline void write_map_csv(const DatasetMap& map, const std::vector<Group>* groups, std::ostream& os) {
  os << "index,mu,sigma,correctness,bucket,outlier_score,group\n";
  for (std::size_t r = 0; r < map.size(); ++r) {
    os << map.examples[r] << ',' << detail::format_decimal(map.mu[r]) << ',' << detail::format_decimal(map.sigma[r])
       << ',' << detail::format_decimal(map.correctness[r]) << ',' << bucket_name(map.bucket[r]) << ','
       << detail::format_decimal(map.outlier_score[r]) << ',';
    if (groups) os << group_name((*groups)[map.examples[r]]);
    os << '\n';
  }
}

struct MapCsv {
  DatasetMap map;
  /// Empty entries where the group column was blank.
  std::vector<std::optional<Group>> groups;
};

inline MapCsv read_map_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "index,mu,sigma,correctness,bucket,outlier_score,group")
    throw ParseError("unexpected map header", 1);
  MapCsv out;
  std::size_t line_no = 1;
  auto number = [&](std::string_view cell) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || p != cell.data() + cell.size()) throw ParseError("bad number '" + std::string(cell) + "'", line_no);
    return v;
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != 7) throw ParseError("expected 7 columns", line_no);
    std::size_t idx = 0;
    auto [p, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), idx);
    if (ec != std::errc{} || p != cells[0].data() + cells[0].size()) throw ParseError("bad index", line_no);
    auto b = parse_bucket(cells[4]);
    if (!b) throw ParseError("bad bucket '" + std::string(cells[4]) + "'", line_no);
    if (!out.map.examples.empty() && idx <= out.map.examples.back()) throw ParseError("indices must ascend", line_no);
    out.map.examples.push_back(idx);
    out.map.mu.push_back(number(cells[1]));
    out.map.sigma.push_back(number(cells[2]));
    out.map.correctness.push_back(number(cells[3]));
    out.map.bucket.push_back(*b);
    out.map.outlier_score.push_back(number(cells[5]));
    out.groups.push_back(cells[6].empty() ? std::nullopt : parse_group(cells[6]));
  }
  return out;
}

inline MapCsv load_map_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open map", path);
  return read_map_csv(is);
}

inline std::string map_scatter_svg(const DatasetMap& map, std::string_view title) {
  svg::Document doc(700, 480);
  svg::Frame f;
  f.x_max = 0.5;
  f.draw_axes(doc, title, "variability", "confidence");
  for (double t : {0.25, 0.5, 0.75}) doc.line(f.px(0), f.py(t), f.px(0.5), f.py(t), "#bbbbbb", 0.5);
  // Correctness bins share a color ramp from red (never correct) to blue.
  static constexpr std::string_view ramp[] = {"#d73027", "#fc8d59", "#fee090", "#91bfdb", "#4575b4"};
  for (std::size_t r = 0; r < map.size(); ++r) {
    const auto bin = std::min<std::size_t>(4, static_cast<std::size_t>(map.correctness[r] * 5.0));
    doc.circle(f.px(std::min(map.sigma[r], 0.5)), f.py(map.mu[r]), 2.0, ramp[bin], 0.6);
  }
  for (std::size_t i = 0; i < 5; ++i) {
    doc.rect(640, 60 + 18.0 * static_cast<double>(i), 10, 10, ramp[i]);
    doc.text(655, 69 + 18.0 * static_cast<double>(i), svg::num(0.2 * static_cast<double>(i)), 9);
  }
  doc.text(640, 52, "correct", 9);
  return doc.str();
}

}  // namespace alcart
