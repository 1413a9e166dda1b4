// SPDX-License-Identifier: Apache-2.0
#include "convrec/simulation/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "convrec/dialogue/uncertainty.hpp"
#include "convrec/errors.hpp"
#include "convrec/rng.hpp"

namespace convrec::sim {

using dialogue::kUnknown;

double binary_entropy(double pr) {
  auto term = [](double x) { return x > 0.0 ? -x * std::log(x) : 0.0; };
  return term(pr) + term(1.0 - pr);
}

std::optional<AttributeId> max_entropy_attribute(std::span<const ItemId> candidates,
                                                 const data::ItemCatalog& catalog,
                                                 std::span<const double> feedback,
                                                 std::vector<double>* entropies) {
  if (feedback.size() != catalog.num_attributes()) {
    throw ConfigError("feedback length differs from the attribute count");
  }
  std::vector<double> h(catalog.num_attributes(), 0.0);
  std::optional<AttributeId> best;
  if (!candidates.empty()) {
    std::vector<std::size_t> count(catalog.num_attributes(), 0);
    for (ItemId v : candidates) {
      for (AttributeId p : catalog.attributes_of(v)) ++count[p.index()];
    }
    const double n = static_cast<double>(candidates.size());
    for (std::size_t p = 0; p < h.size(); ++p) {
      h[p] = binary_entropy(static_cast<double>(count[p]) / n);
      if (feedback[p] != kUnknown) continue;
      if (!best || h[p] > h[best->index()]) best = AttributeId(p);
    }
  }
  if (entropies) *entropies = std::move(h);
  return best;
}

std::optional<AttributeId> RandomSelector::select(const dialogue::SelectionContext& ctx,
                                                  std::vector<double>*) const {
  std::vector<AttributeId> open;
  for (std::size_t p = 0; p < ctx.state.feedback.size(); ++p) {
    if (ctx.state.feedback[p] == kUnknown) open.emplace_back(p);
  }
  if (open.empty()) return std::nullopt;
  Rng rng(ctx.seed);
  return open[uniform_index(rng, open.size())];
}

std::optional<AttributeId> MostInformativeSelector::select(const dialogue::SelectionContext& ctx,
                                                           std::vector<double>* scores) const {
  const auto& feedback = ctx.state.feedback;
  std::vector<double> overlap(feedback.size(), 0.0);
  std::optional<AttributeId> best;
  std::size_t best_overlap = 0;
  for (std::size_t p = 0; p < feedback.size(); ++p) {
    if (feedback[p] != kUnknown) continue;
    std::vector<double> a = feedback;
    std::vector<ItemId> slates[2];
    for (int value = 0; value < 2; ++value) {
      a[p] = value;
      const auto q = dialogue::current_beliefs(ctx.models, ctx.user, a);
      slates[value] = ctx.ranker.rank(ctx.models, ctx.user, q, ctx.state.candidates,
                                      ctx.policy.slate_size);
      std::sort(slates[value].begin(), slates[value].end());
    }
    std::vector<ItemId> common;
    std::set_intersection(slates[0].begin(), slates[0].end(), slates[1].begin(), slates[1].end(),
                          std::back_inserter(common));
    overlap[p] = static_cast<double>(common.size());
    if (!best || common.size() < best_overlap) {
      best = AttributeId(p);
      best_overlap = common.size();
    }
  }
  if (scores) *scores = std::move(overlap);
  return best;
}

std::optional<AttributeId> MaxEntropySelector::select(const dialogue::SelectionContext& ctx,
                                                      std::vector<double>* scores) const {
  return max_entropy_attribute(ctx.state.candidates, ctx.models.catalog, ctx.state.feedback,
                               scores);
}

std::optional<AttributeId> HighestScoreSelector::select(const dialogue::SelectionContext& ctx,
                                                        std::vector<double>* scores) const {
  if (scores) scores->assign(ctx.beliefs.begin(), ctx.beliefs.end());
  return dialogue::select_query_attribute(ctx.beliefs, ctx.state.feedback);
}

std::vector<ItemId> TopPopRanker::rank(const dialogue::ModelBundle& models,
                                       const dialogue::UserContext&, std::span<const double>,
                                       std::span<const ItemId> candidates, std::size_t k) const {
  if (models.popularity.size() != models.catalog.num_items()) {
    throw ConfigError("popularity ranking needs one count per item");
  }
  std::vector<ItemId> order(candidates.begin(), candidates.end());
  const std::size_t n = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                    [&](ItemId a, ItemId b) {
                      const auto pa = models.popularity[a.index()];
                      const auto pb = models.popularity[b.index()];
                      return pa != pb ? pa > pb : a < b;
                    });
  order.resize(n);
  return order;
}

const std::vector<std::string>& strategy_names() {
  static const std::vector<std::string> names{"minicorn",      "random", "most-inf",
                                              "max-entropy",   "highest-score", "greedy"};
  return names;
}

const std::vector<std::string>& ablation_strategies() {
  static const std::vector<std::string> names(strategy_names().begin(),
                                              strategy_names().begin() + 5);
  return names;
}

namespace {

std::string joined(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

}  // namespace

std::shared_ptr<const dialogue::AttributeSelector> make_selector(std::string_view name) {
  if (name == "minicorn") return std::make_shared<dialogue::UncertaintySelector>();
  if (name == "random") return std::make_shared<RandomSelector>();
  if (name == "most-inf") return std::make_shared<MostInformativeSelector>();
  if (name == "max-entropy") return std::make_shared<MaxEntropySelector>();
  if (name == "highest-score") return std::make_shared<HighestScoreSelector>();
  if (name == "greedy") return std::make_shared<GreedySelector>();
  throw ConfigError("unknown strategy '" + std::string(name) + "' (expected one of " +
                    joined(strategy_names()) + ")");
}

std::shared_ptr<const dialogue::Ranker> make_ranker(std::string_view name) {
  if (name == "rn") return std::make_shared<dialogue::RnRanker>();
  if (name == "toppop") return std::make_shared<TopPopRanker>();
  throw ConfigError("unknown ranker '" + std::string(name) + "' (expected rn or toppop)");
}

}  // namespace convrec::sim
