#pragma once

// Logistic regression and a one-hidden-layer tanh MLP with dropout, trained by
// seeded minibatch SGD with hand-written backpropagation.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "datagen.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace alcart {

enum class ModelKind { logreg, mlp };

inline std::string_view model_kind_name(ModelKind k) { return k == ModelKind::mlp ? "mlp" : "logreg"; }

inline ModelKind parse_model_kind(std::string_view s) {
  if (s == "mlp") return ModelKind::mlp;
  if (s == "logreg") return ModelKind::logreg;
  throw ConfigError("unknown model kind '" + std::string(s) + "'");
}

enum class RepresentationSpace { vision, language, fused };

struct ModelSpec {
  ModelKind kind = ModelKind::mlp;
  int hidden_dim = 64;
  double dropout_rate = 0.2;
  int vision_dims = 0;
  int language_dims = 0;
  int num_classes = 0;
  /// Weights are init_scale * N(0, 1) / sqrt(fan_in); biases start at zero.
  double init_scale = 1.0;
  std::uint64_t rng_seed = 0;

  int input_dims() const { return vision_dims + language_dims; }
  bool has_hidden() const { return kind == ModelKind::mlp; }

  void validate() const {
    if (vision_dims < 1 || language_dims < 1) throw ConfigError("model input subspaces need >= 1 dim");
    if (num_classes < 2) throw ConfigError("model needs >= 2 classes");
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw ConfigError("dropout_rate must lie in [0, 1)");
    if (kind == ModelKind::mlp && hidden_dim < 1) throw ConfigError("hidden_dim must be >= 1");
    if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw ConfigError("init_scale must be finite and >= 0");
  }

  /// Copies the input layout from a dataset.
  ModelSpec with_layout(const Dataset& ds) const {
    ModelSpec s = *this;
    s.vision_dims = ds.vision_dims;
    s.language_dims = ds.language_dims;
    s.num_classes = ds.num_classes;
    return s;
  }
};

struct Model {
  ModelSpec spec;
  Eigen::MatrixXd hidden_weights;  // D x H, MLP only
  Eigen::VectorXd hidden_bias;     // H
  Eigen::MatrixXd output_weights;  // (H or D) x C
  Eigen::VectorXd output_bias;     // C

  bool all_finite() const {
    return hidden_weights.allFinite() && hidden_bias.allFinite() && output_weights.allFinite() &&
           output_bias.allFinite();
  }

  bool operator==(const Model& o) const {
    auto same = [](const auto& a, const auto& b) { return a.rows() == b.rows() && a.cols() == b.cols() && a == b; };
    return spec.kind == o.spec.kind && spec.hidden_dim == o.spec.hidden_dim &&
           spec.dropout_rate == o.spec.dropout_rate && spec.vision_dims == o.spec.vision_dims &&
           spec.language_dims == o.spec.language_dims && spec.num_classes == o.spec.num_classes &&
           spec.init_scale == o.spec.init_scale && spec.rng_seed == o.spec.rng_seed &&
           same(hidden_weights, o.hidden_weights) && same(hidden_bias, o.hidden_bias) &&
           same(output_weights, o.output_weights) && same(output_bias, o.output_bias);
  }
};

inline Model init_model(const ModelSpec& spec) {
  spec.validate();
  Rng rng(spec.rng_seed);
  auto fill = [&](Eigen::MatrixXd& w, int rows, int cols) {
    w.resize(rows, cols);
    const double scale = spec.init_scale / std::sqrt(static_cast<double>(rows));
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) w(r, c) = scale * rng.normal();
  };
  Model m;
  m.spec = spec;
  const int d = spec.input_dims();
  if (spec.has_hidden()) {
    fill(m.hidden_weights, d, spec.hidden_dim);
    m.hidden_bias = Eigen::VectorXd::Zero(spec.hidden_dim);
    fill(m.output_weights, spec.hidden_dim, spec.num_classes);
  } else {
    fill(m.output_weights, d, spec.num_classes);
  }
  m.output_bias = Eigen::VectorXd::Zero(spec.num_classes);
  return m;
}

namespace detail {

inline void softmax_rows(Eigen::MatrixXd& logits) {
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

inline void check_input_width(const Model& m, Eigen::Index cols) {
  if (cols != m.spec.input_dims())
    throw UsageError("input has " + std::to_string(cols) + " features, model expects " +
                     std::to_string(m.spec.input_dims()));
}

/// Hidden activations (post-tanh, no dropout), n x H.
inline Eigen::MatrixXd hidden_activations(const Model& m, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd z = x * m.hidden_weights;
  z.rowwise() += m.hidden_bias.transpose();
  return z.array().tanh().matrix();
}

inline Eigen::MatrixXd output_proba(const Model& m, const Eigen::MatrixXd& features) {
  Eigen::MatrixXd logits = features * m.output_weights;
  logits.rowwise() += m.output_bias.transpose();
  softmax_rows(logits);
  return logits;
}

inline int argmax(const Eigen::Ref<const Eigen::RowVectorXd>& p) {
  Eigen::Index best = 0;
  p.maxCoeff(&best);
  return static_cast<int>(best);
}

}  // namespace detail

/// Class probabilities for each row of `x` (n x D), dropout disabled.
inline Eigen::MatrixXd predict_proba_batch(const Model& m, const Eigen::MatrixXd& x) {
  detail::check_input_width(m, x.cols());
  if (m.spec.has_hidden()) return detail::output_proba(m, detail::hidden_activations(m, x));
  return detail::output_proba(m, x);
}

inline Eigen::VectorXd predict_proba(const Model& m, const Eigen::VectorXd& vision, const Eigen::VectorXd& language) {
  if (vision.size() != m.spec.vision_dims || language.size() != m.spec.language_dims)
    throw UsageError("feature pair does not match model layout");
  Eigen::MatrixXd x(1, m.spec.input_dims());
  x << vision.transpose(), language.transpose();
  return predict_proba_batch(m, x).row(0).transpose();
}

inline Eigen::MatrixXd predict_proba(const Model& m, const Dataset& ds, const IndexSet& rows) {
  std::vector<Eigen::Index> r(rows.begin(), rows.end());
  return predict_proba_batch(m, ds.x(r, Eigen::all));
}

/// `k` stochastic passes for one input row, dropout masks drawn from Rng(seed).
/// Returns a k x C matrix.
inline Eigen::MatrixXd mc_dropout_proba(const Model& m, const Eigen::RowVectorXd& x, int k, std::uint64_t seed) {
  if (k < 1) throw UsageError("mc dropout needs k >= 1 passes");
  detail::check_input_width(m, x.cols());
  const bool stochastic = m.spec.has_hidden() && m.spec.dropout_rate > 0.0;
  if (!stochastic) {
    Eigen::MatrixXd p = predict_proba_batch(m, x);
    return p.replicate(k, 1);
  }
  const Eigen::MatrixXd h = detail::hidden_activations(m, x);
  const double keep = 1.0 - m.spec.dropout_rate;
  Rng rng(seed);
  Eigen::MatrixXd dropped(k, h.cols());
  for (int pass = 0; pass < k; ++pass)
    for (Eigen::Index j = 0; j < h.cols(); ++j) dropped(pass, j) = rng.uniform() < keep ? h(0, j) / keep : 0.0;
  return detail::output_proba(m, dropped);
}

/// MC-dropout passes for many examples. Example `rows[i]` uses the mask stream
/// derive_seed(seed, rows[i]), so the result does not depend on batching or
/// evaluation order.
inline std::vector<Eigen::MatrixXd> mc_dropout_batch(const Model& m, const Dataset& ds, const IndexSet& rows, int k,
                                                     std::uint64_t seed) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(rows.size());
  for (auto r : rows)
    out.push_back(mc_dropout_proba(m, ds.x.row(static_cast<Eigen::Index>(r)), k, derive_seed(seed, r)));
  return out;
}

/// Vision/language return the raw subspace features; fused returns the
/// penultimate activation (hidden layer for the MLP, the full input for
/// logistic regression).
inline Eigen::MatrixXd representations(const Model& m, const Eigen::MatrixXd& x, RepresentationSpace space) {
  detail::check_input_width(m, x.cols());
  switch (space) {
    case RepresentationSpace::vision: return x.leftCols(m.spec.vision_dims);
    case RepresentationSpace::language: return x.rightCols(m.spec.language_dims);
    case RepresentationSpace::fused:
      return m.spec.has_hidden() ? detail::hidden_activations(m, x) : x;
  }
  return x;
}

inline Eigen::VectorXd hidden_representation(const Model& m, const Eigen::VectorXd& vision,
                                             const Eigen::VectorXd& language, RepresentationSpace space) {
  if (vision.size() != m.spec.vision_dims || language.size() != m.spec.language_dims)
    throw UsageError("feature pair does not match model layout");
  Eigen::MatrixXd x(1, m.spec.input_dims());
  x << vision.transpose(), language.transpose();
  return representations(m, x, space).row(0).transpose();
}

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.05;
  int minibatch_size = 32;
  double l2_penalty = 1e-4;
  std::uint64_t rng_seed = 0;
  /// Also record the dropout-free mean cross-entropy over the whole subset
  /// after every epoch.
  bool record_subset_loss = false;

  void validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (minibatch_size < 1) throw ConfigError("minibatch_size must be >= 1");
    if (!(l2_penalty >= 0.0)) throw ConfigError("l2_penalty must be >= 0");
  }
};

/// Gold-label confidence per watched example (rows) and epoch (columns),
/// taken from the end-of-epoch snapshot with dropout disabled.
struct TrainingDynamics {
  IndexSet examples;
  Eigen::MatrixXd gold_confidence;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> correct;

  std::size_t epochs() const { return static_cast<std::size_t>(gold_confidence.cols()); }
};

struct TrainResult {
  Model model;
  /// Mean minibatch loss (training mode) per epoch.
  std::vector<double> epoch_loss;
  /// Dropout-free mean cross-entropy over the subset; filled when requested.
  std::vector<double> subset_loss;
  std::optional<TrainingDynamics> dynamics;
};

/// Mean cross-entropy of `rows` under the dropout-free model.
inline double mean_cross_entropy(const Model& m, const Dataset& ds, const IndexSet& rows) {
  const Eigen::MatrixXd p = predict_proba(m, ds, rows);
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    total -= std::log(std::max(p(static_cast<Eigen::Index>(i), ds.labels[rows[i]]), 1e-300));
  return total / static_cast<double>(rows.size());
}

inline double accuracy(const Model& m, const Dataset& ds, const IndexSet& rows) {
  if (rows.empty()) throw UsageError("accuracy over an empty set");
  const Eigen::MatrixXd p = predict_proba(m, ds, rows);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rows.size(); ++i)
    hits += detail::argmax(p.row(static_cast<Eigen::Index>(i))) == ds.labels[rows[i]];
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

namespace detail {

struct Gradients {
  Eigen::MatrixXd hidden_weights;
  Eigen::VectorXd hidden_bias;
  Eigen::MatrixXd output_weights;
  Eigen::VectorXd output_bias;
};

/// Cross-entropy loss (mean over rows) and its gradient. `mask` (n x H, values
/// 0 or 1/keep) is applied after the nonlinearity when non-empty.
inline double loss_and_gradient(const Model& m, const Eigen::MatrixXd& x, const std::vector<int>& y,
                                const Eigen::MatrixXd& mask, double l2, Gradients& g) {
  const auto n = static_cast<double>(x.rows());
  Eigen::MatrixXd h, features;
  if (m.spec.has_hidden()) {
    h = hidden_activations(m, x);
    features = mask.size() ? Eigen::MatrixXd(h.cwiseProduct(mask)) : h;
  } else {
    features = x;
  }
  Eigen::MatrixXd p = output_proba(m, features);
  double loss = 0.0;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const int label = y[static_cast<std::size_t>(r)];
    loss -= std::log(std::max(p(r, label), 1e-300));
    p(r, label) -= 1.0;
  }
  loss /= n;
  p /= n;  // dL/dlogits

  g.output_weights = features.transpose() * p;
  g.output_bias = p.colwise().sum().transpose();
  if (l2 > 0.0) {
    g.output_weights += l2 * m.output_weights;
    loss += 0.5 * l2 * m.output_weights.squaredNorm();
  }
  if (m.spec.has_hidden()) {
    Eigen::MatrixXd dh = p * m.output_weights.transpose();
    if (mask.size()) dh = dh.cwiseProduct(mask);
    const Eigen::MatrixXd dz = dh.cwiseProduct((1.0 - h.array().square()).matrix());
    g.hidden_weights = x.transpose() * dz;
    g.hidden_bias = dz.colwise().sum().transpose();
    if (l2 > 0.0) {
      g.hidden_weights += l2 * m.hidden_weights;
      loss += 0.5 * l2 * m.hidden_weights.squaredNorm();
    }
  }
  return loss;
}

}  // namespace detail

/// Minibatch SGD on cross-entropy over `subset`. Shuffle order and dropout
/// masks come from streams derived from cfg.rng_seed. When `watch` is given,
/// records training dynamics for those examples.
inline TrainResult train(Model model, const Dataset& ds, const IndexSet& subset, const TrainConfig& cfg,
                         const IndexSet* watch = nullptr) {
  cfg.validate();
  if (subset.empty()) throw UsageError("training subset is empty");
  for (auto i : subset)
    if (i >= ds.size()) throw UsageError("training index out of range");
  detail::check_input_width(model, ds.input_dims());
  if (watch)
    for (auto i : *watch)
      if (i >= ds.size()) throw UsageError("watch index out of range");

  Rng order_rng(derive_seed(cfg.rng_seed, 1));
  Rng mask_rng(derive_seed(cfg.rng_seed, 2));
  const bool use_dropout = model.spec.has_hidden() && model.spec.dropout_rate > 0.0;
  const double keep = 1.0 - model.spec.dropout_rate;
  const auto batch = static_cast<std::size_t>(cfg.minibatch_size);

  TrainResult out;
  if (watch) {
    out.dynamics.emplace();
    out.dynamics->examples = *watch;
    out.dynamics->gold_confidence.resize(static_cast<Eigen::Index>(watch->size()), cfg.epochs);
    out.dynamics->correct.resize(static_cast<Eigen::Index>(watch->size()), cfg.epochs);
  }

  std::vector<std::size_t> order = subset;
  std::vector<Eigen::Index> rows;
  std::vector<int> y;
  Eigen::MatrixXd mask;
  detail::Gradients g;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    order_rng.shuffle(order);
    double epoch_total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      rows.assign(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end));
      y.resize(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) y[i] = ds.labels[static_cast<std::size_t>(rows[i])];
      const Eigen::MatrixXd xb = ds.x(rows, Eigen::all);
      if (use_dropout) {
        mask.resize(xb.rows(), model.spec.hidden_dim);
        for (Eigen::Index r = 0; r < mask.rows(); ++r)
          for (Eigen::Index c = 0; c < mask.cols(); ++c) mask(r, c) = mask_rng.uniform() < keep ? 1.0 / keep : 0.0;
      } else {
        mask.resize(0, 0);
      }
      const double loss = detail::loss_and_gradient(model, xb, y, mask, cfg.l2_penalty, g);
      epoch_total += loss * static_cast<double>(rows.size());
      model.output_weights -= cfg.learning_rate * g.output_weights;
      model.output_bias -= cfg.learning_rate * g.output_bias;
      if (model.spec.has_hidden()) {
        model.hidden_weights -= cfg.learning_rate * g.hidden_weights;
        model.hidden_bias -= cfg.learning_rate * g.hidden_bias;
      }
    }
    const double mean_loss = epoch_total / static_cast<double>(order.size());
    if (!std::isfinite(mean_loss) || !model.all_finite()) throw NumericError("non-finite training loss", epoch + 1);
    out.epoch_loss.push_back(mean_loss);
    if (cfg.record_subset_loss) out.subset_loss.push_back(mean_cross_entropy(model, ds, subset));

    if (watch) {
      const Eigen::MatrixXd p = predict_proba(model, ds, *watch);
      for (std::size_t i = 0; i < watch->size(); ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const int gold = ds.labels[(*watch)[i]];
        out.dynamics->gold_confidence(r, epoch) = p(r, gold);
        out.dynamics->correct(r, epoch) = detail::argmax(p.row(r)) == gold;
      }
    }
  }
  out.model = std::move(model);
  return out;
}

/// Largest relative error between the analytic cross-entropy gradient and
/// central finite differences, over every parameter, for one example with
/// dropout disabled. Relative error is |a - n| / max(|a|, |n|, 1e-6).
inline double gradient_check(const Model& model, const Eigen::RowVectorXd& x, int label, double epsilon) {
  if (!(epsilon > 0.0)) throw UsageError("epsilon must be > 0");
  detail::check_input_width(model, x.cols());
  const Eigen::MatrixXd xm = x;
  const std::vector<int> y{label};
  const Eigen::MatrixXd no_mask;
  detail::Gradients analytic, scratch;
  detail::loss_and_gradient(model, xm, y, no_mask, 0.0, analytic);

  Model probe = model;
  double worst = 0.0;
  auto check = [&](auto& param, const auto& grad) {
    for (Eigen::Index i = 0; i < param.size(); ++i) {
      const double saved = param.data()[i];
      param.data()[i] = saved + epsilon;
      const double up = detail::loss_and_gradient(probe, xm, y, no_mask, 0.0, scratch);
      param.data()[i] = saved - epsilon;
      const double down = detail::loss_and_gradient(probe, xm, y, no_mask, 0.0, scratch);
      param.data()[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = grad.data()[i];
      worst = std::max(worst, std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6}));
    }
  };
  check(probe.output_weights, analytic.output_weights);
  check(probe.output_bias, analytic.output_bias);
  if (model.spec.has_hidden()) {
    check(probe.hidden_weights, analytic.hidden_weights);
    check(probe.hidden_bias, analytic.hidden_bias);
  }
  return worst;
}

// Checkpoint format: JSON object {"format": "alcart-model", "version": 1,
// "spec": {...}, "<tensor>": {"rows", "cols", "data" (row-major)}}. Doubles are
// written with round-trip precision.

inline void to_json(nlohmann::json& j, const ModelSpec& s) {
  j = nlohmann::json{{"kind", model_kind_name(s.kind)}, {"hidden_dim", s.hidden_dim},
                     {"dropout_rate", s.dropout_rate},  {"vision_dims", s.vision_dims},
                     {"language_dims", s.language_dims}, {"num_classes", s.num_classes},
                     {"init_scale", s.init_scale},       {"rng_seed", s.rng_seed}};
}

inline void from_json(const nlohmann::json& j, ModelSpec& s) {
  ModelSpec d;
  s.kind = parse_model_kind(j.value("kind", std::string(model_kind_name(d.kind))));
  s.hidden_dim = j.value("hidden_dim", d.hidden_dim);
  s.dropout_rate = j.value("dropout_rate", d.dropout_rate);
  s.vision_dims = j.value("vision_dims", d.vision_dims);
  s.language_dims = j.value("language_dims", d.language_dims);
  s.num_classes = j.value("num_classes", d.num_classes);
  s.init_scale = j.value("init_scale", d.init_scale);
  s.rng_seed = j.value("rng_seed", d.rng_seed);
}

inline void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{{"epochs", c.epochs},
                     {"learning_rate", c.learning_rate},
                     {"minibatch_size", c.minibatch_size},
                     {"l2_penalty", c.l2_penalty},
                     {"rng_seed", c.rng_seed}};
}

inline void from_json(const nlohmann::json& j, TrainConfig& c) {
  TrainConfig d;
  c.epochs = j.value("epochs", d.epochs);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.minibatch_size = j.value("minibatch_size", d.minibatch_size);
  c.l2_penalty = j.value("l2_penalty", d.l2_penalty);
  c.rng_seed = j.value("rng_seed", d.rng_seed);
}

namespace detail {

inline nlohmann::json tensor_json(const Eigen::MatrixXd& m) {
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

inline Eigen::MatrixXd tensor_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw ParseError("tensor size mismatch", 0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<std::size_t>(r * cols + c)];
  return m;
}

}  // namespace detail

inline nlohmann::json model_to_json(const Model& m) {
  return {{"format", "alcart-model"},
          {"version", 1},
          {"spec", m.spec},
          {"hidden_weights", detail::tensor_json(m.hidden_weights)},
          {"hidden_bias", detail::tensor_json(m.hidden_bias)},
          {"output_weights", detail::tensor_json(m.output_weights)},
          {"output_bias", detail::tensor_json(m.output_bias)}};
}

inline Model model_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "alcart-model") throw ParseError("not a model checkpoint", 0);
  Model m;
  m.spec = j.at("spec").get<ModelSpec>();
  m.spec.validate();
  m.hidden_weights = detail::tensor_from_json(j.at("hidden_weights"));
  m.hidden_bias = detail::tensor_from_json(j.at("hidden_bias"));
  m.output_weights = detail::tensor_from_json(j.at("output_weights"));
  m.output_bias = detail::tensor_from_json(j.at("output_bias"));
  const int d = m.spec.input_dims();
  const int fan = m.spec.has_hidden() ? m.spec.hidden_dim : d;
  const bool ok = m.output_weights.rows() == fan && m.output_weights.cols() == m.spec.num_classes &&
                  m.output_bias.size() == m.spec.num_classes &&
                  (!m.spec.has_hidden() ||
                   (m.hidden_weights.rows() == d && m.hidden_weights.cols() == m.spec.hidden_dim &&
                    m.hidden_bias.size() == m.spec.hidden_dim));
  if (!ok || !m.all_finite()) throw ParseError("checkpoint tensors inconsistent with spec", 0);
  return m;
}

inline void save_model(const Model& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open for writing", path);
  os << model_to_json(m).dump(1) << '\n';
}

inline Model load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint", path);
  return model_from_json(nlohmann::json::parse(is));
}

}  // namespace alcart
