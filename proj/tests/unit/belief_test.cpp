// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "convrec/belief/belief_tracker.hpp"
#include "convrec/belief/relation.hpp"
#include "convrec/belief/training.hpp"
#include "convrec/errors.hpp"
#include "convrec/nnkit/gradcheck.hpp"
#include "fixtures.hpp"

using namespace convrec;
using namespace convrec::belief;

namespace {

void expect_symmetric_unit_diagonal(const RelationMatrix& a) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a(i, i), 1.0);
    for (std::size_t j = 0; j < a.size(); ++j) ASSERT_EQ(a(i, j), a(j, i));
  }
}

}  // namespace

TEST(RelationMatrix, SymmetrizationMatchesHandOracle) {
  Rng rng(4);
  const auto raw = fixtures::random_vector(16, rng, -2, 2);
  const auto a = RelationMatrix::from_raw(raw, 4);
  expect_symmetric_unit_diagonal(a);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      EXPECT_EQ(a(i, j), (raw[i * 4 + j] + raw[j * 4 + i]) / 2.0);
    }
  }
  EXPECT_THROW(RelationMatrix::from_raw(raw, 3), ConfigError);
}

TEST(PredictBeliefs, IdentityAndUnitDiagonal) {
  const auto id = RelationMatrix::from_raw(std::vector<double>(9, 0.0), 3);
  const std::vector<double> a = {1.0, 0.5, 0.0};
  EXPECT_EQ(predict_beliefs(id, a), a);
  EXPECT_THROW(predict_beliefs(id, std::vector<double>(2)), ConfigError);
}

TEST(PredictBeliefs, RandomMatrixMatchesLoopOracle) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = RelationMatrix::from_raw(fixtures::random_vector(25, rng, -1.5, 1.5), 5);
    const std::vector<double> fb = {1, 0, 0.5, 0.5, 0.5};
    const auto q = predict_beliefs(a, fb);
    for (std::size_t i = 0; i < 5; ++i) {
      double acc = 0;
      for (std::size_t j = 0; j < 5; ++j) acc += a(i, j) * fb[j];
      EXPECT_NEAR(q[i], std::min(1.0, std::max(0.0, acc)), 1e-12);
      EXPECT_GE(q[i], 0.0);
      EXPECT_LE(q[i], 1.0);
    }
  }
}

TEST(PredictBeliefs, SmallOffDiagonalsPreserveFeedbackStructure) {
  Rng rng(31);
  const std::size_t p = 7;
  const double bound = 0.5 / static_cast<double>(p - 1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = RelationMatrix::from_raw(fixtures::random_vector(p * p, rng, -bound, bound), p);
    std::vector<double> fb(p);
    for (double& x : fb) x = uniform01(rng) < 0.5 ? 1.0 : 0.0;
    const auto q = predict_beliefs(a, fb);
    for (std::size_t i = 0; i < p; ++i) EXPECT_EQ(q[i] > 0.5, fb[i] == 1.0);
  }
}

TEST(AttributeLoss, ReferenceValues) {
  const std::vector<double> b = {1, 0, 1, 0};
  EXPECT_LT(attribute_loss(b, b), 4 * 2e-6);
  EXPECT_NEAR(attribute_loss(std::vector<double>(4, 0.5), b), 4 * std::log(2.0), 1e-12);
  EXPECT_NEAR(attribute_loss(std::vector<double>{0.9, 0.2}, std::vector<double>{1, 0}),
              -(std::log(0.9) + std::log(0.8)), 1e-12);
  EXPECT_NEAR(attribute_loss(std::vector<double>{0.9, 0.2}, std::vector<double>{1, 0}), 0.3285,
              1e-4);
  const std::vector<std::vector<double>> qs = {{0.9, 0.2}, {0.5, 0.5}};
  const std::vector<std::vector<double>> bs = {{1, 0}, {1, 1}};
  EXPECT_NEAR(attribute_loss(qs, bs), (-(std::log(0.9) + std::log(0.8)) + 2 * std::log(2.0)) / 2,
              1e-12);
  // Out-of-range inputs are clamped, so the loss stays finite.
  EXPECT_TRUE(std::isfinite(attribute_loss(std::vector<double>{-3.0, 4.0}, std::vector<double>{1, 0})));
}

TEST(AttributeLoss, GridMinimumIsAtClampedTarget) {
  for (const auto& b : std::vector<std::vector<double>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
    double best = INFINITY;
    std::vector<double> arg;
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        const std::vector<double> q = {kLossEpsilon + (1 - 2 * kLossEpsilon) * i / n,
                                       kLossEpsilon + (1 - 2 * kLossEpsilon) * j / n};
        const double l = attribute_loss(q, b);
        if (l < best) best = l, arg = q;
      }
    }
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(arg[k], std::clamp(b[k], kLossEpsilon, 1 - kLossEpsilon), 1e-12);
    }
  }
}

TEST(AttributeLoss, GradientInsideRangeMatchesFiniteDifferences) {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto raw = fixtures::random_vector(6, rng, 0.05, 0.95);
    std::vector<double> b(6);
    for (double& x : b) x = uniform01(rng) < 0.5 ? 1.0 : 0.0;
    const auto g = attribute_loss_gradient(raw, b, 1e9);
    const auto report = nn::check_function_gradient(
        [&](std::span<const double> x) { return attribute_loss(x, b); }, raw, g, 1e-7);
    EXPECT_LT(report.max_relative_error, 1e-6) << report.worst;
  }
}

TEST(AttributeLoss, ClampGradientPassesOnlyInward) {
  // b = 1 below the range: descent raises q, so the gradient survives (clipped).
  auto g = attribute_loss_gradient(std::vector<double>{-0.3}, std::vector<double>{1.0}, 100.0);
  EXPECT_EQ(g[0], -100.0);
  // b = 0 below the range: descent would push further out.
  g = attribute_loss_gradient(std::vector<double>{-0.3}, std::vector<double>{0.0}, 100.0);
  EXPECT_EQ(g[0], 0.0);
  g = attribute_loss_gradient(std::vector<double>{1.7}, std::vector<double>{0.0}, 100.0);
  EXPECT_EQ(g[0], 100.0);
  g = attribute_loss_gradient(std::vector<double>{1.7}, std::vector<double>{1.0}, 100.0);
  EXPECT_EQ(g[0], 0.0);
}

TEST(RelationGradient, ChainThroughSymmetrizationMatchesFiniteDifferences) {
  Rng rng(13);
  const std::size_t p = 4;
  const auto raw = fixtures::random_vector(p * p, rng);
  const auto w = fixtures::random_vector(p * p, rng);
  // f(R) = <W, sym(R)>
  auto f = [&](std::span<const double> r) {
    const auto a = RelationMatrix::from_raw(r, p);
    double s = 0;
    for (std::size_t i = 0; i < p * p; ++i) s += w[i] * a.values()[i];
    return s;
  };
  const auto g = relation_gradient_to_raw(w, p);
  EXPECT_LT(nn::check_function_gradient(f, raw, g).max_relative_error, 1e-8);
}

TEST(BeliefTracker, OutputsAreSymmetricInEveryMode) {
  const BeliefTracker t(6, 5, 8, fixtures::tiny_btn(), 1);
  EXPECT_EQ(t.network().output_shape(), (nn::Shape{36}));
  Rng rng(2);
  const nn::Tensor hist({5, 6}, fixtures::random_vector(30, rng, 0, 1));
  const auto e = fixtures::random_vector(8, rng);
  expect_symmetric_unit_diagonal(t.relation_matrix(e, hist, nn::Mode::kEval));
  for (int i = 0; i < 5; ++i) {
    expect_symmetric_unit_diagonal(t.relation_matrix(e, hist, nn::Mode::kMcDropout, &rng));
  }
  const auto a1 = t.relation_matrix(e, hist, nn::Mode::kEval);
  const auto a2 = t.relation_matrix(e, hist, nn::Mode::kEval);
  EXPECT_TRUE(std::equal(a1.values().begin(), a1.values().end(), a2.values().begin()));
  EXPECT_THROW(t.relation_matrix(e, nn::Tensor({5, 5}), nn::Mode::kEval), ConfigError);
  EXPECT_THROW(t.relation_matrix(std::vector<double>(7), hist, nn::Mode::kEval), ConfigError);
}

TEST(BeliefTracker, CheckpointRoundTrip) {
  const BeliefTracker t(4, 3, 5, fixtures::tiny_btn(), 9);
  nn::Checkpoint ck;
  t.store(ck);
  const auto back = BeliefTracker::restore(ck);
  EXPECT_EQ(back.architecture(), t.architecture());
  const nn::Tensor hist({3, 4}, 1.0);
  const std::vector<double> e(5, 0.3);
  const std::vector<double> fb = {1, 0.5, 0.5, 0};
  EXPECT_EQ(back.beliefs(e, hist, fb), t.beliefs(e, hist, fb));
}

TEST(BtnTraining, PairGradientMatchesFiniteDifferences) {
  // Dropout on, masks replayed from the same seed for every evaluation.
  const BeliefTracker t(5, 3, 4, fixtures::tiny_btn(0.2), 3);
  Rng data(8);
  const nn::Tensor hist({3, 5}, fixtures::random_vector(15, data, 0, 1));
  const auto e = fixtures::random_vector(4, data);
  const std::vector<double> b = {1, 0, 1, 0, 0};
  const std::vector<double> masked = {1, 0.5, 0.5, 0, 0.5};
  auto grads = t.network().make_gradients();
  Rng rng(77);
  accumulate_btn_pair(t, e, hist, masked, b, 1e9, 1.0, rng, grads);
  auto& net = const_cast<BeliefTracker&>(t).network();
  auto loss = [&]() {
    Rng r(77);
    auto scratch = net.make_gradients();
    return accumulate_btn_pair(t, e, hist, masked, b, 1e9, 1.0, r, scratch);
  };
  double worst = 0;
  const auto params = net.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < params[k]->size(); i += 3) {
      double& slot = (*params[k])[i];
      const double saved = slot, h = 1e-6;
      slot = saved + h;
      const double up = loss();
      slot = saved - h;
      const double down = loss();
      slot = saved;
      worst = std::max(worst, nn::relative_error(grads[k][i], (up - down) / (2 * h)));
    }
  }
  EXPECT_LT(worst, 1e-4);
}

namespace {

struct BtnFixture {
  data::Dataset ds;
  rec::EmbeddingStore store;
};

}  // namespace

TEST(BtnTraining, ZeroEpochsLeaveParametersUnchanged) {
  BtnFixture f{fixtures::small_dataset(), {}};
  f.store = rec::EmbeddingStore::random(f.ds.log.num_users(), f.ds.catalog.num_items(), 4, 1);
  BeliefTracker t(f.ds.catalog.num_attributes(), 5, 4, fixtures::tiny_btn(), 1);
  const auto before = t.network().clone();
  BtnTrainingConfig cfg;
  cfg.epochs = 0;
  const BtnTrainingData data{f.ds.catalog, f.ds.histories, f.store, f.ds.splits.train.records, {}};
  const auto report = train_btn(t, data, cfg);
  EXPECT_EQ(report.steps, 0u);
  const auto a = t.network().parameters();
  const auto b = before.parameters();
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(*a[i], *b[i]);
}

TEST(BtnTraining, OneItemCatalogIsFitFromFullFeedback) {
  const auto catalog = fixtures::catalog_from({{0, 2}}, 4);
  data::InteractionLog log;
  log.user_names = {"u0", "u1"};
  log.records = {{UserId(0), ItemId(0), 1}, {UserId(1), ItemId(0), 1}};
  const auto histories = data::select_histories(log, 3, data::HistoryPolicy::kLatest);
  const auto store = rec::EmbeddingStore::random(2, 1, 4, 2);
  BeliefTracker t(4, 3, 4, fixtures::tiny_btn(), 2);
  BtnTrainingConfig cfg;
  cfg.epochs = 300;
  cfg.batch_size = 2;
  cfg.learning_rate = 3e-3;
  const BtnTrainingData data{catalog, histories, store, log.records, {}};
  train_btn(t, data, cfg);
  const auto b = catalog.attribute_vector(ItemId(0));
  const ItemId skip(0);
  const auto hist = data::history_attribute_matrix(catalog, histories[0], 3, &skip);
  const auto q = t.beliefs(store.user(UserId(0)), hist, b);
  EXPECT_LT(attribute_loss(q, b), 0.05);
}

TEST(BtnTraining, HeldOutLossDecreasesAndIsReproducible) {
  BtnFixture f{fixtures::small_dataset(21, 60, 6, 30), {}};
  f.store = rec::EmbeddingStore::random(f.ds.log.num_users(), f.ds.catalog.num_items(), 4, 1);
  const BtnTrainingData data{f.ds.catalog, f.ds.histories, f.store, f.ds.splits.train.records,
                             f.ds.splits.validation.records};
  BtnTrainingConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 16;
  cfg.learning_rate = 3e-3;
  auto run = [&]() {
    BeliefTracker t(6, 5, 4, fixtures::tiny_btn(), 4);
    return train_btn(t, data, cfg);
  };
  const auto a = run();
  const auto b = run();
  EXPECT_LT(a.final_validation_loss, a.initial_validation_loss);
  EXPECT_EQ(a.final_validation_loss, b.final_validation_loss);
  EXPECT_EQ(a.epochs.size(), 5u);
}

TEST(BtnTraining, RejectsMismatchedConfiguration) {
  BtnFixture f{fixtures::small_dataset(), {}};
  f.store = rec::EmbeddingStore::random(f.ds.log.num_users(), f.ds.catalog.num_items(), 4, 1);
  const BtnTrainingData data{f.ds.catalog, f.ds.histories, f.store, f.ds.splits.train.records, {}};
  BeliefTracker wrong(f.ds.catalog.num_attributes() + 1, 5, 4, fixtures::tiny_btn(), 1);
  EXPECT_THROW(train_btn(wrong, data, {}), ConfigError);
  BeliefTracker t(f.ds.catalog.num_attributes(), 5, 4, fixtures::tiny_btn(), 1);
  BtnTrainingConfig cfg;
  cfg.batch_size = 0;
  EXPECT_THROW(train_btn(t, data, cfg), ConfigError);
}
