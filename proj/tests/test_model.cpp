#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "datagen.hpp"
#include "model.hpp"
#include "oracles.hpp"

using namespace alcart;

namespace {

ModelSpec spec_for(ModelKind kind, int dv, int dl, int c, std::uint64_t seed, double dropout = 0.2) {
  ModelSpec s;
  s.kind = kind;
  s.hidden_dim = 6;
  s.dropout_rate = dropout;
  s.vision_dims = dv;
  s.language_dims = dl;
  s.num_classes = c;
  s.rng_seed = seed;
  return s;
}

Dataset two_blobs(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset ds;
  ds.vision_dims = 2;
  ds.language_dims = 2;
  ds.num_classes = 2;
  ds.x.resize(static_cast<Eigen::Index>(n), 4);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    for (int d = 0; d < 4; ++d) ds.x(static_cast<Eigen::Index>(i), d) = (y ? 3.0 : -3.0) + 0.5 * rng.normal();
    ds.labels.push_back(y);
    ds.groups.push_back(Group::learnable);
  }
  return ds;
}

}  // namespace

TEST(Init, DeterministicAndShaped) {
  const auto s = spec_for(ModelKind::logreg, 5, 3, 4, 7);
  const auto a = init_model(s), b = init_model(s);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.output_weights.rows(), 8);
  EXPECT_EQ(a.output_weights.cols(), 4);
  EXPECT_EQ(a.output_bias.size(), 4);
  EXPECT_EQ(a.hidden_weights.size(), 0);

  const auto mlp = init_model(spec_for(ModelKind::mlp, 5, 3, 4, 7));
  EXPECT_EQ(mlp.hidden_weights.rows(), 8);
  EXPECT_EQ(mlp.hidden_weights.cols(), 6);
  EXPECT_EQ(mlp.output_weights.rows(), 6);
}

TEST(Init, ZeroScaleGivesUniformOutput) {
  auto s = spec_for(ModelKind::mlp, 3, 3, 5, 1);
  s.init_scale = 0.0;
  const auto m = init_model(s);
  EXPECT_TRUE(m.output_weights.isZero());
  Eigen::VectorXd v(3), l(3);
  v << 1, -2, 3;
  l << 0.5, 0.5, -9;
  const auto p = predict_proba(m, v, l);
  for (Eigen::Index c = 0; c < p.size(); ++c) EXPECT_NEAR(p(c), 0.2, 1e-15);
}

TEST(Init, RejectsInvalidSpec) {
  auto s = spec_for(ModelKind::mlp, 3, 3, 5, 1, 1.0);
  EXPECT_THROW(init_model(s), ConfigError);
  s = spec_for(ModelKind::mlp, 3, 3, 5, 1);
  s.hidden_dim = 0;
  EXPECT_THROW(init_model(s), ConfigError);
  s = spec_for(ModelKind::logreg, 0, 3, 5, 1);
  EXPECT_THROW(init_model(s), ConfigError);
}

TEST(Predict, ValidDistributionForAnyInput) {
  const auto m = init_model(spec_for(ModelKind::mlp, 4, 4, 7, 3));
  Rng rng(1);
  Eigen::MatrixXd x(200, 8);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = 50.0 * rng.normal();
  const auto p = predict_proba_batch(m, x);
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    EXPECT_NEAR(p.row(r).sum(), 1.0, 1e-9);
    EXPECT_GE(p.row(r).minCoeff(), 0.0);
  }
}

TEST(Predict, LogitShiftInvariance) {
  auto m = init_model(spec_for(ModelKind::logreg, 2, 2, 3, 4));
  Eigen::VectorXd v(2), l(2);
  v << 0.3, -1;
  l << 2, 0.1;
  const auto p = predict_proba(m, v, l);
  m.output_bias.array() += 123.0;
  const auto q = predict_proba(m, v, l);
  EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Predict, DimensionMismatchIsUsageError) {
  const auto m = init_model(spec_for(ModelKind::logreg, 2, 2, 3, 4));
  EXPECT_THROW(predict_proba(m, Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)), UsageError);
  EXPECT_THROW(predict_proba_batch(m, Eigen::MatrixXd::Zero(2, 5)), UsageError);
}

TEST(McDropout, ZeroRateIsDegenerate) {
  const auto m = init_model(spec_for(ModelKind::mlp, 3, 2, 4, 5, 0.0));
  Eigen::RowVectorXd x(5);
  x << 1, 2, 3, -1, 0.5;
  const auto passes = mc_dropout_proba(m, x, 10, 99);
  ASSERT_EQ(passes.rows(), 10);
  const Eigen::RowVectorXd ref = predict_proba_batch(m, Eigen::MatrixXd(x)).row(0);
  for (Eigen::Index k = 0; k < passes.rows(); ++k) EXPECT_EQ(passes.row(k), ref);
}

TEST(McDropout, PassesDifferAndMeanIsDistribution) {
  const auto m = init_model(spec_for(ModelKind::mlp, 3, 2, 4, 5, 0.5));
  Eigen::RowVectorXd x(5);
  x << 1, 2, 3, -1, 0.5;
  const auto passes = mc_dropout_proba(m, x, 10, 99);
  EXPECT_GT((passes.row(0) - passes.row(1)).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(passes.colwise().mean().sum(), 1.0, 1e-9);
  EXPECT_EQ(passes, mc_dropout_proba(m, x, 10, 99));
  EXPECT_THROW(mc_dropout_proba(m, x, 0, 1), UsageError);
}

TEST(McDropout, BatchSeedsPerExample) {
  GeneratorConfig gc;
  gc.num_examples = 20;
  gc.vision_dims = 2;
  gc.language_dims = 2;
  gc.num_classes = 3;
  gc.rng_seed = 1;
  const auto ds = generate_synthetic(gc);
  const auto m = init_model(spec_for(ModelKind::mlp, 2, 2, 3, 5, 0.3));
  const auto a = mc_dropout_batch(m, ds, {3, 7, 11}, 5, 42);
  const auto b = mc_dropout_batch(m, ds, {11, 7}, 5, 42);
  EXPECT_EQ(a[2], b[0]);
  EXPECT_EQ(a[1], b[1]);
}

TEST(Representation, SpacesHaveDefinedShapes) {
  const auto lr = init_model(spec_for(ModelKind::logreg, 3, 2, 4, 1));
  const auto mlp = init_model(spec_for(ModelKind::mlp, 3, 2, 4, 1));
  Eigen::VectorXd v(3), l(2);
  v << 1, 2, 3;
  l << 4, 5;
  Eigen::VectorXd cat(5);
  cat << v, l;
  EXPECT_EQ(hidden_representation(lr, v, l, RepresentationSpace::fused), cat);
  EXPECT_EQ(hidden_representation(lr, v, l, RepresentationSpace::vision), v);
  EXPECT_EQ(hidden_representation(mlp, v, l, RepresentationSpace::language), l);
  EXPECT_EQ(hidden_representation(mlp, v, l, RepresentationSpace::fused).size(), 6);
}

class GradientCheck : public ::testing::TestWithParam<ModelKind> {};

TEST_P(GradientCheck, MatchesFiniteDifferenceOracle) {
  Rng rng(31);
  for (int inst = 0; inst < 20; ++inst) {
    const auto m = oracle::random_instance(GetParam(), derive_seed(7, inst), rng);
    Eigen::RowVectorXd x(5);
    for (Eigen::Index d = 0; d < 5; ++d) x(d) = rng.normal();
    const int label = static_cast<int>(rng.below(4));
    EXPECT_LT(oracle::gradient_error(m, x, label, 1e-5), 1e-4) << "instance " << inst;
    EXPECT_LT(gradient_check(m, x, label, 1e-5), 1e-4) << "instance " << inst;
  }
}

INSTANTIATE_TEST_SUITE_P(Kinds, GradientCheck, ::testing::Values(ModelKind::logreg, ModelKind::mlp),
                         [](const auto& info) { return std::string(model_kind_name(info.param)); });

TEST(GradientCheckEdge, LogitDominatedCaseIsSmallButFinite) {
  auto m = init_model(spec_for(ModelKind::logreg, 1, 1, 3, 2));
  m.output_weights.setZero();
  m.output_bias << 30, 0, 0;
  Eigen::RowVectorXd x(2);
  x << 0.2, -0.1;
  detail::Gradients g;
  const double loss = detail::loss_and_gradient(m, Eigen::MatrixXd(x), {0}, Eigen::MatrixXd(), 0.0, g);
  EXPECT_GT(loss, 0.0);
  EXPECT_TRUE(std::isfinite(g.output_bias.norm()));
  EXPECT_GT(g.output_bias.norm(), 0.0);
  EXPECT_LT(g.output_bias.norm(), 1e-10);
  EXPECT_THROW(gradient_check(m, x, 0, 0.0), UsageError);
}

TEST(Train, SeparableBlobsReachHighAccuracy) {
  const auto ds = two_blobs(200, 3);
  for (auto kind : {ModelKind::logreg, ModelKind::mlp}) {
    const auto spec = spec_for(kind, 2, 2, 2, 1).with_layout(ds);
    TrainConfig tc;
    tc.rng_seed = 5;
    const auto res = train(init_model(spec), ds, ds.all_indices(), tc);
    EXPECT_GE(accuracy(res.model, ds, ds.all_indices()), 0.99);
  }
}

TEST(Train, DynamicsHaveOneColumnPerEpoch) {
  const auto ds = two_blobs(40, 3);
  TrainConfig tc;
  tc.epochs = 7;
  const IndexSet watch{0, 5, 9};
  const auto res = train(init_model(spec_for(ModelKind::mlp, 2, 2, 2, 1)), ds, ds.all_indices(), tc, &watch);
  ASSERT_TRUE(res.dynamics);
  EXPECT_EQ(res.dynamics->epochs(), 7u);
  EXPECT_EQ(res.dynamics->gold_confidence.rows(), 3);
  EXPECT_EQ(res.dynamics->examples, watch);
  EXPECT_GE(res.dynamics->gold_confidence.minCoeff(), 0.0);
  EXPECT_LE(res.dynamics->gold_confidence.maxCoeff(), 1.0);
  EXPECT_EQ(res.epoch_loss.size(), 7u);
}

TEST(Train, Deterministic) {
  GeneratorConfig gc;
  gc.num_examples = 300;
  gc.outlier_fraction_noise = 0.1;
  gc.rng_seed = 3;
  const auto ds = generate_synthetic(gc);
  ModelSpec spec;
  spec.rng_seed = 4;
  TrainConfig tc;
  tc.epochs = 5;
  tc.rng_seed = 6;
  const auto watch = ds.all_indices();
  const auto a = train(init_model(spec.with_layout(ds)), ds, ds.all_indices(), tc, &watch);
  const auto b = train(init_model(spec.with_layout(ds)), ds, ds.all_indices(), tc, &watch);
  EXPECT_TRUE(a.model == b.model);
  EXPECT_EQ(a.dynamics->gold_confidence, b.dynamics->gold_confidence);
  tc.rng_seed = 7;
  const auto c = train(init_model(spec.with_layout(ds)), ds, ds.all_indices(), tc);
  EXPECT_FALSE(a.model == c.model);
}

// Shipped default is the MLP at lr 0.05. Logistic regression reaches its loss
// floor within 30 epochs and then jitters under constant-step SGD for lr above
// about 0.01, so it is asserted below that threshold.
TEST(Train, SubsetLossNonIncreasingOnDefaultConfig) {
  GeneratorConfig gc;
  gc.rng_seed = 42;
  gc.outlier_fraction_noise = 0.15;
  gc.outlier_fraction_underspecified = 0.15;
  gc.outlier_spread = 1.0;
  const auto ds = generate_synthetic(gc);
  for (auto [kind, lr] : {std::pair{ModelKind::mlp, 0.05}, std::pair{ModelKind::logreg, 0.01}}) {
    ModelSpec spec;
    spec.kind = kind;
    spec.rng_seed = 1;
    TrainConfig tc;
    tc.learning_rate = lr;
    tc.rng_seed = 2;
    tc.record_subset_loss = true;
    const auto res = train(init_model(spec.with_layout(ds)), ds, ds.all_indices(), tc);
    ASSERT_EQ(res.subset_loss.size(), 30u);
    for (std::size_t e = 1; e < res.subset_loss.size(); ++e)
      EXPECT_LE(res.subset_loss[e], res.subset_loss[e - 1] + 1e-12) << model_kind_name(kind) << " epoch " << e + 1;
  }
}

TEST(Train, ErrorPaths) {
  const auto ds = two_blobs(10, 1);
  const auto m = init_model(spec_for(ModelKind::logreg, 2, 2, 2, 1));
  TrainConfig tc;
  EXPECT_THROW(train(m, ds, {}, tc), UsageError);
  EXPECT_THROW(train(m, ds, {0, 99}, tc), UsageError);
  tc.epochs = 0;
  EXPECT_THROW(train(m, ds, {0, 1}, tc), ConfigError);
  tc = TrainConfig{};
  tc.learning_rate = 1e6;
  auto big = ds;
  big.x *= 1e150;
  EXPECT_THROW(train(m, big, big.all_indices(), tc), NumericError);
}

TEST(Checkpoint, LosslessRoundTrip) {
  auto m = init_model(spec_for(ModelKind::mlp, 3, 4, 5, 17));
  m.output_bias(2) = 0.1 + 0.2;
  m.hidden_weights(0, 0) = 1e-310;
  const auto back = model_from_json(nlohmann::json::parse(model_to_json(m).dump()));
  EXPECT_TRUE(back == m);

  const auto path = std::filesystem::temp_directory_path() / "alcart_model_roundtrip.json";
  save_model(m, path.string());
  EXPECT_TRUE(load_model(path.string()) == m);
  std::filesystem::remove(path);
  EXPECT_THROW(load_model("/nonexistent/model.json"), IoError);
}
