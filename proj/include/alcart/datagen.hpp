#pragma once

// Synthetic pools with injected collective outliers, seed/pool splitting and
// the dataset CSV format.

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "error.hpp"
#include "rng.hpp"

namespace alcart {

using IndexSet = std::vector<std::size_t>;

enum class Group { learnable, noise_collective, underspecified_collective };

inline std::string_view group_name(Group g) {
  switch (g) {
    case Group::learnable: return "learnable";
    case Group::noise_collective: return "noise_collective";
    case Group::underspecified_collective: return "underspecified_collective";
  }
  return "?";
}

inline std::optional<Group> parse_group(std::string_view s) {
  if (s == "learnable") return Group::learnable;
  if (s == "noise_collective") return Group::noise_collective;
  if (s == "underspecified_collective") return Group::underspecified_collective;
  return std::nullopt;
}

/// Labeled examples whose feature vector is split into a vision-like and a
/// language-like block. Row i of `x` is [vision | language].
struct Dataset {
  Eigen::MatrixXd x;
  int vision_dims = 0;
  int language_dims = 0;
  std::vector<int> labels;
  std::vector<Group> groups;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  int input_dims() const { return vision_dims + language_dims; }

  auto vision() const { return x.leftCols(vision_dims); }
  auto language() const { return x.rightCols(language_dims); }

  std::size_t count(Group g) const {
    return static_cast<std::size_t>(std::count(groups.begin(), groups.end(), g));
  }

  IndexSet all_indices() const {
    IndexSet idx(size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return idx;
  }

  void validate() const {
    if (size() == 0) throw UsageError("dataset is empty");
    if (vision_dims < 1 || language_dims < 1) throw UsageError("feature subspaces need at least one dimension");
    if (static_cast<std::size_t>(x.rows()) != size() || x.cols() != input_dims())
      throw UsageError("feature matrix shape does not match labels/dims");
    if (groups.size() != size()) throw UsageError("group tags do not match example count");
    for (int y : labels)
      if (y < 0 || y >= num_classes) throw UsageError("label out of range");
  }

  bool operator==(const Dataset& o) const {
    return vision_dims == o.vision_dims && language_dims == o.language_dims && num_classes == o.num_classes &&
           labels == o.labels && groups == o.groups && x.rows() == o.x.rows() && x.cols() == o.x.cols() &&
           x == o.x;
  }
};

struct GeneratorConfig {
  std::size_t num_examples = 5000;
  int num_classes = 10;
  int vision_dims = 16;
  int language_dims = 16;
  /// Standard deviation of each class cluster (class centers are N(0, I)).
  double cluster_spread = 1.75;
  /// Standard deviation of outlier clusters; <= 0 means cluster_spread.
  double outlier_spread = 0.0;
  double outlier_fraction_noise = 0.0;
  double outlier_fraction_underspecified = 0.0;
  int noise_clusters = 3;
  int underspecified_clusters = 3;
  /// Examples sharing one feature vector, each with a distinct label.
  int underspecified_group_size = 4;
  std::uint64_t rng_seed = 0;

  std::size_t noise_count() const {
    return static_cast<std::size_t>(std::llround(outlier_fraction_noise * static_cast<double>(num_examples)));
  }
  std::size_t underspecified_count() const {
    return static_cast<std::size_t>(
        std::llround(outlier_fraction_underspecified * static_cast<double>(num_examples)));
  }

  void validate() const {
    if (num_examples == 0) throw ConfigError("num_examples must be positive");
    if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
    if (vision_dims < 1 || language_dims < 1) throw ConfigError("subspace dims must be >= 1");
    if (!(cluster_spread > 0.0)) throw ConfigError("cluster_spread must be > 0");
    auto in_unit = [](double f) { return f >= 0.0 && f <= 1.0; };
    if (!in_unit(outlier_fraction_noise) || !in_unit(outlier_fraction_underspecified))
      throw ConfigError("outlier fractions must lie in [0, 1]");
    if (outlier_fraction_noise + outlier_fraction_underspecified >= 1.0)
      throw ConfigError("outlier fractions must sum to < 1");
    if (noise_count() > 0 && noise_clusters < 1) throw ConfigError("noise_clusters must be >= 1");
    if (underspecified_count() > 0) {
      if (underspecified_clusters < 1) throw ConfigError("underspecified_clusters must be >= 1");
      if (underspecified_group_size < 2 || underspecified_group_size >= num_classes)
        throw ConfigError("underspecified_group_size must be in [2, num_classes)");
      if (underspecified_count() < 2) throw ConfigError("underspecified collective needs >= 2 examples");
    }
    if (noise_count() + underspecified_count() >= num_examples)
      throw ConfigError("no learnable examples left after outlier injection");
  }
};

inline void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = nlohmann::json{{"num_examples", c.num_examples},
                     {"num_classes", c.num_classes},
                     {"vision_dims", c.vision_dims},
                     {"language_dims", c.language_dims},
                     {"cluster_spread", c.cluster_spread},
                     {"outlier_spread", c.outlier_spread},
                     {"outlier_fraction_noise", c.outlier_fraction_noise},
                     {"outlier_fraction_underspecified", c.outlier_fraction_underspecified},
                     {"noise_clusters", c.noise_clusters},
                     {"underspecified_clusters", c.underspecified_clusters},
                     {"underspecified_group_size", c.underspecified_group_size},
                     {"rng_seed", c.rng_seed}};
}

inline void from_json(const nlohmann::json& j, GeneratorConfig& c) {
  GeneratorConfig d;
  c.num_examples = j.value("num_examples", d.num_examples);
  c.num_classes = j.value("num_classes", d.num_classes);
  c.vision_dims = j.value("vision_dims", d.vision_dims);
  c.language_dims = j.value("language_dims", d.language_dims);
  c.cluster_spread = j.value("cluster_spread", d.cluster_spread);
  c.outlier_spread = j.value("outlier_spread", d.outlier_spread);
  c.outlier_fraction_noise = j.value("outlier_fraction_noise", d.outlier_fraction_noise);
  c.outlier_fraction_underspecified = j.value("outlier_fraction_underspecified", d.outlier_fraction_underspecified);
  c.noise_clusters = j.value("noise_clusters", d.noise_clusters);
  c.underspecified_clusters = j.value("underspecified_clusters", d.underspecified_clusters);
  c.underspecified_group_size = j.value("underspecified_group_size", d.underspecified_group_size);
  c.rng_seed = j.value("rng_seed", d.rng_seed);
}

/// Learnable examples form one isotropic Gaussian per class. Noise collectives
/// sit in their own clusters with uniformly random labels. Underspecified
/// collectives are groups of identical feature vectors carrying distinct labels.
/// Pure function of `cfg`.
inline Dataset generate_synthetic(const GeneratorConfig& cfg) {
  cfg.validate();
  const int dims = cfg.vision_dims + cfg.language_dims;
  const double outlier_spread = cfg.outlier_spread > 0.0 ? cfg.outlier_spread : cfg.cluster_spread;
  Rng rng(cfg.rng_seed);

  auto draw_centers = [&](int n) {
    Eigen::MatrixXd c(n, dims);
    for (int r = 0; r < n; ++r)
      for (int k = 0; k < dims; ++k) c(r, k) = rng.normal();
    return c;
  };
  const Eigen::MatrixXd class_centers = draw_centers(cfg.num_classes);
  const Eigen::MatrixXd noise_centers = draw_centers(std::max(cfg.noise_clusters, 1));
  const Eigen::MatrixXd under_centers = draw_centers(std::max(cfg.underspecified_clusters, 1));

  const std::size_t n = cfg.num_examples;
  const std::size_t n_noise = cfg.noise_count();
  const std::size_t n_under = cfg.underspecified_count();
  const std::size_t n_learn = n - n_noise - n_under;

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), dims);
  std::vector<int> labels(n);
  std::vector<Group> groups(n);
  std::size_t row = 0;

  auto emit_point = [&](const Eigen::MatrixXd& centers, int c, double spread) {
    for (int k = 0; k < dims; ++k)
      x(static_cast<Eigen::Index>(row), k) = centers(c, k) + spread * rng.normal();
  };

  for (std::size_t i = 0; i < n_learn; ++i, ++row) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(cfg.num_classes));
    emit_point(class_centers, c, cfg.cluster_spread);
    labels[row] = c;
    groups[row] = Group::learnable;
  }
  for (std::size_t i = 0; i < n_noise; ++i, ++row) {
    const int c = static_cast<int>(i % static_cast<std::size_t>(cfg.noise_clusters));
    emit_point(noise_centers, c, outlier_spread);
    labels[row] = static_cast<int>(rng.below(static_cast<std::uint64_t>(cfg.num_classes)));
    groups[row] = Group::noise_collective;
  }

  // Partition into groups of the configured size; a leftover of one example
  // joins the previous group so every group has >= 2 members.
  std::vector<std::size_t> group_sizes;
  const auto g = static_cast<std::size_t>(cfg.underspecified_group_size);
  for (std::size_t left = n_under; left > 0;) {
    std::size_t take = std::min(g, left);
    if (left - take == 1 && take + 1 <= static_cast<std::size_t>(cfg.num_classes)) ++take;
    group_sizes.push_back(take);
    left -= take;
  }
  for (std::size_t gi = 0; gi < group_sizes.size(); ++gi) {
    const int c = static_cast<int>(gi % static_cast<std::size_t>(cfg.underspecified_clusters));
    const std::size_t first = row;
    emit_point(under_centers, c, outlier_spread);
    const auto distinct = rng.sample_without_replacement(static_cast<std::size_t>(cfg.num_classes), group_sizes[gi]);
    for (std::size_t m = 0; m < group_sizes[gi]; ++m, ++row) {
      if (m > 0) x.row(static_cast<Eigen::Index>(row)) = x.row(static_cast<Eigen::Index>(first));
      labels[row] = static_cast<int>(distinct[m]);
      groups[row] = Group::underspecified_collective;
    }
  }

  // Interleave groups so that example index carries no provenance.
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  rng.shuffle(perm);

  Dataset ds;
  ds.x.resize(static_cast<Eigen::Index>(n), dims);
  ds.labels.resize(n);
  ds.groups.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(perm[i]));
    ds.labels[i] = labels[perm[i]];
    ds.groups[i] = groups[perm[i]];
  }
  ds.vision_dims = cfg.vision_dims;
  ds.language_dims = cfg.language_dims;
  ds.num_classes = cfg.num_classes;
  return ds;
}

struct SeedPoolSplit {
  IndexSet seed;
  IndexSet pool;
};

/// Uniform split of `indices` without replacement; both halves come back sorted.
inline SeedPoolSplit split_seed_pool(const IndexSet& indices, double seed_fraction, std::uint64_t rng_seed) {
  if (!(seed_fraction > 0.0 && seed_fraction < 1.0)) throw ConfigError("seed_fraction must lie in (0, 1)");
  if (indices.empty()) throw UsageError("cannot split an empty index set");
  const auto n = indices.size();
  auto k = static_cast<std::size_t>(std::llround(seed_fraction * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n > 1 ? n - 1 : 1);

  Rng rng(rng_seed);
  auto picked = rng.sample_without_replacement(n, k);
  std::vector<char> in_seed(n, 0);
  for (auto p : picked) in_seed[p] = 1;
  SeedPoolSplit split;
  for (std::size_t i = 0; i < n; ++i) (in_seed[i] ? split.seed : split.pool).push_back(indices[i]);
  std::sort(split.seed.begin(), split.seed.end());
  std::sort(split.pool.begin(), split.pool.end());
  return split;
}

inline SeedPoolSplit split_seed_pool(const Dataset& ds, double seed_fraction, std::uint64_t rng_seed) {
  return split_seed_pool(ds.all_indices(), seed_fraction, rng_seed);
}

struct HoldoutSplit {
  IndexSet train;
  IndexSet validation;
};

/// Holds out round(fraction * stratum size) examples from every (group, label)
/// stratum. Both outputs sorted.
inline HoldoutSplit stratified_holdout(const Dataset& ds, double fraction, std::uint64_t rng_seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("validation fraction must lie in (0, 1)");
  std::map<std::pair<int, int>, IndexSet> strata;
  for (std::size_t i = 0; i < ds.size(); ++i)
    strata[{static_cast<int>(ds.groups[i]), ds.labels[i]}].push_back(i);

  Rng rng(rng_seed);
  HoldoutSplit out;
  for (auto& [key, members] : strata) {
    rng.shuffle(members);
    const auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(members.size())));
    out.validation.insert(out.validation.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(k));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(k), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  if (out.train.empty() || out.validation.empty()) throw ConfigError("validation split leaves an empty side");
  return out;
}

namespace detail {

/// Shortest decimal (fixed notation) string that parses back to `v` exactly.
inline std::string format_decimal(double v) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace detail

/// Header `v0..v{Dv-1},l0..l{Dl-1},label,group`.
inline void write_csv(const Dataset& ds, std::ostream& os) {
  for (int k = 0; k < ds.vision_dims; ++k) os << 'v' << k << ',';
  for (int k = 0; k < ds.language_dims; ++k) os << 'l' << k << ',';
  os << "label,group\n";
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (int k = 0; k < ds.input_dims(); ++k) os << detail::format_decimal(ds.x(static_cast<Eigen::Index>(i), k)) << ',';
    os << ds.labels[i] << ',' << group_name(ds.groups[i]) << '\n';
  }
}

inline void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing", path);
  write_csv(ds, os);
  if (!os) throw IoError("write failed", path);
}

/// Reads the dataset CSV. Without `num_classes`, C = max(label) + 1.
inline Dataset read_csv(std::istream& is, std::optional<int> num_classes = std::nullopt) {
  std::string line;
  if (!std::getline(is, line)) throw ParseError("missing header row", 1);
  const auto header = detail::split_commas(line);

  int dv = 0, dl = 0;
  std::size_t col = 0;
  while (col < header.size() && header[col] == "v" + std::to_string(dv)) ++dv, ++col;
  while (col < header.size() && header[col] == "l" + std::to_string(dl)) ++dl, ++col;
  if (dv < 1 || dl < 1) throw ParseError("header must start with v0.. then l0.. columns", 1);
  if (col >= header.size() || header[col] != "label") throw ParseError("expected 'label' column after features", 1);
  ++col;
  const bool has_group = col < header.size();
  if (has_group && (header[col] != "group" || col + 1 != header.size()))
    throw ParseError("only an optional trailing 'group' column may follow 'label'", 1);
  const std::size_t width = header.size();
  const int dims = dv + dl;

  std::vector<double> values;
  std::vector<int> labels;
  std::vector<Group> groups;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_commas(line);
    if (cells.size() != width)
      throw ParseError("expected " + std::to_string(width) + " columns, found " + std::to_string(cells.size()), line_no);
    for (int k = 0; k < dims; ++k) {
      double v = 0.0;
      const auto cell = cells[static_cast<std::size_t>(k)];
      auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc{} || p != cell.data() + cell.size() || !std::isfinite(v))
        throw ParseError("bad number '" + std::string(cell) + "'", line_no);
      values.push_back(v);
    }
    int y = 0;
    const auto lc = cells[static_cast<std::size_t>(dims)];
    auto [p, ec] = std::from_chars(lc.data(), lc.data() + lc.size(), y);
    if (ec != std::errc{} || p != lc.data() + lc.size() || y < 0)
      throw ParseError("bad label '" + std::string(lc) + "'", line_no);
    if (num_classes && y >= *num_classes)
      throw ParseError("label " + std::to_string(y) + " >= num_classes " + std::to_string(*num_classes), line_no);
    labels.push_back(y);
    if (has_group) {
      auto gtag = parse_group(cells.back());
      if (!gtag) throw ParseError("unknown group '" + std::string(cells.back()) + "'", line_no);
      groups.push_back(*gtag);
    } else {
      groups.push_back(Group::learnable);
    }
  }
  if (labels.empty()) throw ParseError("no data rows", line_no);

  Dataset ds;
  ds.vision_dims = dv;
  ds.language_dims = dl;
  ds.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(labels.size()), dims);
  ds.labels = std::move(labels);
  ds.groups = std::move(groups);
  ds.num_classes = num_classes ? *num_classes : *std::max_element(ds.labels.begin(), ds.labels.end()) + 1;
  if (ds.num_classes < 2) ds.num_classes = 2;
  return ds;
}

inline Dataset load_csv(const std::string& path, std::optional<int> num_classes = std::nullopt) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open dataset", path);
  return read_csv(is, num_classes);
}

}  // namespace alcart
