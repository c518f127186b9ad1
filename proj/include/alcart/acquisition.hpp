#pragma once

// Acquisition functions over the unlabeled pool: random sampling, uncertainty
// scores (least confidence, entropy), MC-dropout scores (mean-entropy, BALD)
// and Core-Set selection by greedy k-center, exact or amortized.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "datagen.hpp"
#include "error.hpp"
#include "model.hpp"
#include "pca.hpp"
#include "rng.hpp"

namespace alcart {

enum class StrategyKind {
  random,
  least_confidence,
  entropy,
  mc_entropy,
  bald,
  coreset_vision,
  coreset_language,
  coreset_fused,
};

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::random,         StrategyKind::least_confidence, StrategyKind::entropy,
    StrategyKind::mc_entropy,     StrategyKind::bald,             StrategyKind::coreset_vision,
    StrategyKind::coreset_language, StrategyKind::coreset_fused,
};

inline std::string_view strategy_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::random: return "random";
    case StrategyKind::least_confidence: return "least-confidence";
    case StrategyKind::entropy: return "entropy";
    case StrategyKind::mc_entropy: return "mc-entropy";
    case StrategyKind::bald: return "bald";
    case StrategyKind::coreset_vision: return "coreset-vision";
    case StrategyKind::coreset_language: return "coreset-language";
    case StrategyKind::coreset_fused: return "coreset-fused";
  }
  return "?";
}

inline StrategyKind parse_strategy(std::string_view s) {
  for (auto k : kAllStrategies)
    if (strategy_name(k) == s) return k;
  throw ConfigError("unknown strategy '" + std::string(s) + "'");
}

inline bool is_bayesian(StrategyKind k) { return k == StrategyKind::mc_entropy || k == StrategyKind::bald; }

inline bool is_coreset(StrategyKind k) {
  return k == StrategyKind::coreset_vision || k == StrategyKind::coreset_language || k == StrategyKind::coreset_fused;
}

inline bool is_uncertainty(StrategyKind k) {
  return k == StrategyKind::least_confidence || k == StrategyKind::entropy || is_bayesian(k);
}

enum class CoresetMode { exact, amortized };

struct AcquisitionStrategy {
  StrategyKind kind = StrategyKind::random;
  int k_passes = 10;
  CoresetMode coreset_mode = CoresetMode::exact;
  /// 0 selects min(32, representation dims).
  int pca_dims = 0;
  /// 0 selects max(1, round(0.05 * B)).
  int refresh_interval = 0;

  void validate() const {
    if (is_bayesian(kind) && k_passes < 2) throw ConfigError("MC strategies need k_passes >= 2");
    if (pca_dims < 0 || refresh_interval < 0) throw ConfigError("pca_dims/refresh_interval must be >= 0 (0 = auto)");
  }
};

struct AcquisitionBatch {
  IndexSet indices;
  /// Score of each index at the moment it was selected.
  std::vector<double> scores;
  /// Set when B exceeded the pool and the whole pool was returned.
  bool truncated = false;
};

// ---------------------------------------------------------------------------
// Scores. Higher means a stronger preference to acquire. Natural log.

namespace detail {

inline void check_distribution(const Eigen::Ref<const Eigen::VectorXd>& p) {
  if (p.size() < 1) throw UsageError("empty probability vector");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < -1e-12) throw UsageError("probability entries must be finite and >= 0");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-6) throw UsageError("probabilities must sum to 1");
}

inline double entropy_unchecked(const Eigen::Ref<const Eigen::VectorXd>& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  return std::max(h, 0.0);
}

inline void check_passes(const Eigen::MatrixXd& passes) {
  if (passes.rows() < 2) throw UsageError("MC scores need at least two passes");
  for (Eigen::Index r = 0; r < passes.rows(); ++r) check_distribution(passes.row(r).transpose());
}

}  // namespace detail

inline double score_least_confidence(const Eigen::Ref<const Eigen::VectorXd>& p) {
  detail::check_distribution(p);
  return std::max(0.0, 1.0 - p.maxCoeff());
}

inline double score_entropy(const Eigen::Ref<const Eigen::VectorXd>& p) {
  detail::check_distribution(p);
  return detail::entropy_unchecked(p);
}

/// Entropy of the mean distribution. `passes` is k x C, one pass per row.
inline double score_mc_entropy(const Eigen::MatrixXd& passes) {
  detail::check_passes(passes);
  const Eigen::VectorXd mean = passes.colwise().mean().transpose();
  return detail::entropy_unchecked(mean);
}

/// Mutual information: H(mean pass) - mean over passes of H(pass).
inline double score_bald(const Eigen::MatrixXd& passes) {
  detail::check_passes(passes);
  const Eigen::VectorXd mean = passes.colwise().mean().transpose();
  double expected = 0.0;
  for (Eigen::Index r = 0; r < passes.rows(); ++r) expected += detail::entropy_unchecked(passes.row(r).transpose());
  expected /= static_cast<double>(passes.rows());
  return std::max(0.0, detail::entropy_unchecked(mean) - expected);
}

// ---------------------------------------------------------------------------
// Selection.

/// Highest `b` scores; ties go to the smaller example index.
inline AcquisitionBatch top_b(const IndexSet& pool, const std::vector<double>& scores, std::size_t b) {
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  b = std::min(b, pool.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(b), order.end(),
                    [&](std::size_t a, std::size_t c) {
                      if (scores[a] != scores[c]) return scores[a] > scores[c];
                      return pool[a] < pool[c];
                    });
  AcquisitionBatch batch;
  for (std::size_t i = 0; i < b; ++i) {
    batch.indices.push_back(pool[order[i]]);
    batch.scores.push_back(scores[order[i]]);
  }
  return batch;
}

namespace detail {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double squared_distance(const RowMatrix& reps, std::size_t a, std::size_t b) {
  const double* pa = reps.data() + static_cast<std::ptrdiff_t>(a) * reps.cols();
  const double* pb = reps.data() + static_cast<std::ptrdiff_t>(b) * reps.cols();
  double s = 0.0;
  for (Eigen::Index k = 0; k < reps.cols(); ++k) {
    const double t = pa[k] - pb[k];
    s += t * t;
  }
  return s;
}

inline void check_coreset_inputs(const Eigen::MatrixXd& reps, const IndexSet& labeled, const IndexSet& pool) {
  if (pool.empty()) throw UsageError("core-set selection over an empty pool");
  const auto n = static_cast<std::size_t>(reps.rows());
  for (auto i : labeled)
    if (i >= n) throw UsageError("labeled index outside representation matrix");
  for (auto i : pool)
    if (i >= n) throw UsageError("pool index outside representation matrix");
}

/// Greedy farthest-point selection in which pool min-distances are folded in
/// with the newly selected centers only every `refresh` selections.
inline AcquisitionBatch greedy_k_center(const RowMatrix& reps, const IndexSet& labeled, const IndexSet& pool,
                                        std::size_t b, std::size_t refresh) {
  AcquisitionBatch batch;
  if (b > pool.size()) batch.truncated = true;
  b = std::min(b, pool.size());
  const auto inf = std::numeric_limits<double>::infinity();
  std::vector<double> min_d2(pool.size(), inf);
  std::vector<char> taken(pool.size(), 0);

  std::optional<std::size_t> forced_first;
  if (labeled.empty()) {
    // No centers yet: start from the pool point nearest the pool centroid.
    Eigen::RowVectorXd centroid = Eigen::RowVectorXd::Zero(reps.cols());
    for (auto i : pool) centroid += reps.row(static_cast<Eigen::Index>(i));
    centroid /= static_cast<double>(pool.size());
    double best = inf;
    for (std::size_t j = 0; j < pool.size(); ++j) {
      const double d2 = (reps.row(static_cast<Eigen::Index>(pool[j])) - centroid).squaredNorm();
      if (d2 < best || (forced_first && d2 == best && pool[j] < pool[*forced_first])) best = d2, forced_first = j;
    }
  } else {
    for (std::size_t j = 0; j < pool.size(); ++j)
      for (auto l : labeled) min_d2[j] = std::min(min_d2[j], squared_distance(reps, pool[j], l));
  }

  std::vector<std::size_t> pending;
  for (std::size_t s = 0; s < b; ++s) {
    if (!pending.empty() && s % refresh == 0) {
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (taken[j]) continue;
        for (auto c : pending) min_d2[j] = std::min(min_d2[j], squared_distance(reps, pool[j], c));
      }
      pending.clear();
    }
    std::size_t pick = pool.size();
    if (s == 0 && forced_first) {
      pick = *forced_first;
    } else {
      for (std::size_t j = 0; j < pool.size(); ++j) {
        if (taken[j]) continue;
        if (pick == pool.size() || min_d2[j] > min_d2[pick] || (min_d2[j] == min_d2[pick] && pool[j] < pool[pick]))
          pick = j;
      }
    }
    taken[pick] = 1;
    batch.indices.push_back(pool[pick]);
    batch.scores.push_back(std::sqrt(min_d2[pick]));
    pending.push_back(pool[pick]);
  }
  return batch;
}

}  // namespace detail

/// Exact batch-aware greedy k-center: every pick is the pool point farthest
/// from labeled ∪ already-picked, with distances updated after each pick.
/// Rows of `reps` are indexed by example index.
inline AcquisitionBatch coreset_greedy(const Eigen::MatrixXd& reps, const IndexSet& labeled, const IndexSet& pool,
                                       std::size_t b) {
  detail::check_coreset_inputs(reps, labeled, pool);
  if (b < 1) throw UsageError("batch size must be >= 1");
  return detail::greedy_k_center(reps, labeled, pool, b, 1);
}

inline std::size_t default_refresh_interval(std::size_t b) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.05 * static_cast<double>(b))));
}

/// PCA-compressed greedy k-center with distance refreshes every
/// `refresh_interval` picks. PCA is fit on the labeled ∪ pool rows.
inline AcquisitionBatch coreset_amortized(const Eigen::MatrixXd& reps, const IndexSet& labeled, const IndexSet& pool,
                                          std::size_t b, int pca_dims, std::size_t refresh_interval) {
  detail::check_coreset_inputs(reps, labeled, pool);
  if (b < 1) throw UsageError("batch size must be >= 1");
  if (refresh_interval < 1) throw UsageError("refresh_interval must be >= 1");
  if (pca_dims < 1 || pca_dims > reps.cols()) throw UsageError("pca_dims must lie in [1, representation dims]");

  IndexSet rows = labeled;
  rows.insert(rows.end(), pool.begin(), pool.end());
  std::vector<Eigen::Index> r(rows.begin(), rows.end());
  const Eigen::MatrixXd subset = reps(r, Eigen::all);
  const auto proj = pca_project(subset, pca_dims);

  // Scatter the projected rows back to example-index positions.
  detail::RowMatrix compact = detail::RowMatrix::Zero(reps.rows(), pca_dims);
  for (std::size_t i = 0; i < rows.size(); ++i)
    compact.row(static_cast<Eigen::Index>(rows[i])) = proj.projected.row(static_cast<Eigen::Index>(i));
  return detail::greedy_k_center(compact, labeled, pool, b, refresh_interval);
}

/// Largest distance from any pool point to its nearest center.
inline double coverage_radius(const Eigen::MatrixXd& reps, const IndexSet& centers, const IndexSet& pool) {
  double worst = 0.0;
  for (auto p : pool) {
    double best = std::numeric_limits<double>::infinity();
    for (auto c : centers)
      best = std::min(best, (reps.row(static_cast<Eigen::Index>(p)) - reps.row(static_cast<Eigen::Index>(c))).squaredNorm());
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

/// Per-example scores for the score-based strategies, aligned with `pool`.
inline std::vector<double> score_pool(const AcquisitionStrategy& strategy, const Model& model, const Dataset& ds,
                                      const IndexSet& pool, std::uint64_t seed) {
  std::vector<double> scores(pool.size());
  if (is_bayesian(strategy.kind)) {
    const auto passes = mc_dropout_batch(model, ds, pool, strategy.k_passes, seed);
    for (std::size_t i = 0; i < pool.size(); ++i)
      scores[i] = strategy.kind == StrategyKind::bald ? score_bald(passes[i]) : score_mc_entropy(passes[i]);
    return scores;
  }
  const Eigen::MatrixXd p = predict_proba(model, ds, pool);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Eigen::VectorXd row = p.row(static_cast<Eigen::Index>(i)).transpose();
    switch (strategy.kind) {
      case StrategyKind::least_confidence: scores[i] = score_least_confidence(row); break;
      case StrategyKind::entropy: scores[i] = score_entropy(row); break;
      default: throw UsageError("strategy is not score-based");
    }
  }
  return scores;
}

inline RepresentationSpace coreset_space(StrategyKind k) {
  switch (k) {
    case StrategyKind::coreset_vision: return RepresentationSpace::vision;
    case StrategyKind::coreset_language: return RepresentationSpace::language;
    default: return RepresentationSpace::fused;
  }
}

/// Picks `b` pool examples for labeling. When b exceeds the pool, the whole
/// pool is returned and `truncated` is set.
inline AcquisitionBatch select_batch(const AcquisitionStrategy& strategy, const Model& model, const Dataset& ds,
                                     const IndexSet& labeled, const IndexSet& pool, std::size_t b,
                                     std::uint64_t rng_seed) {
  strategy.validate();
  if (b < 1) throw UsageError("batch size must be >= 1");
  if (pool.empty()) throw UsageError("cannot acquire from an empty pool");
  for (auto i : pool)
    if (i >= ds.size()) throw UsageError("pool index out of range");
  const bool truncated = b > pool.size();
  b = std::min(b, pool.size());

  AcquisitionBatch batch;
  if (strategy.kind == StrategyKind::random) {
    Rng rng(rng_seed);
    for (auto pos : rng.sample_without_replacement(pool.size(), b)) {
      batch.indices.push_back(pool[pos]);
      batch.scores.push_back(0.0);
    }
  } else if (is_coreset(strategy.kind)) {
    const Eigen::MatrixXd reps = representations(model, ds.x, coreset_space(strategy.kind));
    if (strategy.coreset_mode == CoresetMode::exact) {
      batch = coreset_greedy(reps, labeled, pool, b);
    } else {
      const int dims = strategy.pca_dims > 0 ? std::min<int>(strategy.pca_dims, static_cast<int>(reps.cols()))
                                             : std::min<int>(32, static_cast<int>(reps.cols()));
      const std::size_t refresh = strategy.refresh_interval > 0 ? static_cast<std::size_t>(strategy.refresh_interval)
                                                                : default_refresh_interval(b);
      batch = coreset_amortized(reps, labeled, pool, b, dims, refresh);
    }
  } else {
    batch = top_b(pool, score_pool(strategy, model, ds, pool, rng_seed), b);
  }
  batch.truncated = truncated;
  return batch;
}

}  // namespace alcart
