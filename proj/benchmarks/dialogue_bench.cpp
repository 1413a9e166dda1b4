// SPDX-License-Identifier: Apache-2.0
// Per-turn costs at the reference architecture sizes (D = 64). Models are
// untrained: timing does not depend on the weights.
#include <benchmark/benchmark.h>

#include <map>
#include <memory>

#include "convrec/config/pipeline.hpp"
#include "convrec/datasets/synthetic.hpp"
#include "convrec/dialogue/state.hpp"
#include "convrec/dialogue/uncertainty.hpp"
#include "convrec/simulation/runner.hpp"
#include "convrec/simulation/strategies.hpp"

using namespace convrec;

namespace {

struct World {
  data::Dataset ds;
  std::shared_ptr<const dialogue::ModelBundle> models;
};

// Built once per (items, attributes) and reused across benchmarks.
const World& world(std::size_t items, std::size_t attributes) {
  static std::map<std::pair<std::size_t, std::size_t>, World> cache;
  auto it = cache.find({items, attributes});
  if (it != cache.end()) return it->second;
  data::SyntheticWorldConfig w;
  w.items = items;
  w.attributes = attributes;
  w.users = 100;
  auto gen = data::generate_world(w);
  World out;
  out.ds = data::make_dataset(gen.catalog, gen.log, {}, data::HistoryPolicy::kLatest);
  const std::size_t dim = 64;
  rec::RecommendationNet rn(out.ds.history_length, dim, {}, 1);
  auto store = rec::EmbeddingStore::random(out.ds.log.num_users(), items, dim, 2);
  belief::BeliefTracker btn(attributes, out.ds.history_length, dim, {}, 3);
  out.models = config::assemble_models(out.ds, std::move(rn), std::move(store), std::move(btn));
  return cache.emplace(std::make_pair(items, attributes), std::move(out)).first->second;
}

std::vector<double> half_known(std::size_t p) {
  std::vector<double> a(p, dialogue::kUnknown);
  for (std::size_t i = 0; i < p; i += 3) a[i] = (i / 3) % 2 ? 0.0 : 1.0;
  return a;
}

}  // namespace

static void BM_BeliefForward(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto& w = world(200, p);
  const auto ctx = dialogue::make_user_context(*w.models, UserId(0));
  const auto a = half_known(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dialogue::current_beliefs(*w.models, ctx, a));
  }
}
BENCHMARK(BM_BeliefForward)->Arg(12)->Arg(33)->Unit(benchmark::kMicrosecond);

static void BM_McDropoutVariance(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  const auto& w = world(200, p);
  const auto ctx = dialogue::make_user_context(*w.models, UserId(0));
  const auto a = half_known(p);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dialogue::mc_dropout_variance(
        w.models->btn, ctx.embedding, ctx.history_attributes, a, 10, ++seed));
  }
}
BENCHMARK(BM_McDropoutVariance)->Arg(12)->Arg(33)->Unit(benchmark::kMicrosecond);

static void BM_ScoreCandidates(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto& w = world(n, 12);
  const auto ctx = dialogue::make_user_context(*w.models, UserId(0));
  const auto q = dialogue::current_beliefs(*w.models, ctx, half_known(12));
  std::vector<ItemId> items;
  for (std::size_t v = 0; v < n; ++v) items.emplace_back(v);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dialogue::score_items(*w.models, ctx, q, items));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_ScoreCandidates)->Arg(50)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_CandidateFilter(benchmark::State& state) {
  const auto& w = world(static_cast<std::size_t>(state.range(0)), 12);
  const auto& catalog = w.models->catalog;
  const auto start = dialogue::init_session(catalog, std::nullopt, AttributeId(0));
  for (auto _ : state) {
    auto s = start;
    dialogue::apply_attribute_feedback(s, catalog, AttributeId(1), true);
    dialogue::apply_attribute_feedback(s, catalog, AttributeId(2), false);
    benchmark::DoNotOptimize(s.candidates.data());
  }
}
BENCHMARK(BM_CandidateFilter)->Arg(200)->Arg(5000)->Unit(benchmark::kMicrosecond);

static void BM_NextAction(benchmark::State& state, const char* strategy) {
  const auto& w = world(200, 12);
  config::RunConfig cfg;
  const auto engine = config::make_engine(w.models, cfg, strategy);
  const auto ctx = dialogue::make_user_context(*w.models, UserId(0));
  const auto s = dialogue::init_session(w.models->catalog, UserId(0), AttributeId(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(engine.next_action(s, ctx, 42));
  }
}
BENCHMARK_CAPTURE(BM_NextAction, minicorn, "minicorn")->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_NextAction, max_entropy, "max-entropy")->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_NextAction, most_inf, "most-inf")->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_NextAction, greedy, "greedy")->Unit(benchmark::kMicrosecond);

static void BM_Episode(benchmark::State& state) {
  const auto& w = world(200, 12);
  config::RunConfig cfg;
  const auto engine = config::make_engine(w.models, cfg, "minicorn");
  const auto user = sim::SimulatedUser::for_target(w.models->catalog, UserId(0), ItemId(17));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sim::run_episode(engine, user, ++seed));
  }
}
BENCHMARK(BM_Episode)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
