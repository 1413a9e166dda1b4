// SPDX-License-Identifier: Apache-2.0
#include "convrec/dialogue/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "convrec/dialogue/policy.hpp"
#include "convrec/errors.hpp"
#include "convrec/rng.hpp"

namespace convrec::dialogue {

std::vector<double> normalize_min_max(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double range = *hi - *lo;
  if (!(range > 0.0)) return out;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - *lo) / range;
  return out;
}

std::vector<double> population_variance(std::span<const std::vector<double>> samples) {
  if (samples.empty()) throw UsageError("variance of zero samples");
  const auto& first = samples.front();
  const std::size_t p = first.size();
  const double n = static_cast<double>(samples.size());
  // Deviations are taken from the first sample so identical samples give an
  // exact zero instead of rounding noise from the mean.
  std::vector<double> mean(p, 0.0), var(p, 0.0);
  for (const auto& s : samples) {
    if (s.size() != p) throw ConfigError("samples differ in length");
    for (std::size_t i = 0; i < p; ++i) mean[i] += s[i] - first[i];
  }
  for (double& m : mean) m /= n;
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < p; ++i) {
      const double d = s[i] - first[i] - mean[i];
      var[i] += d * d;
    }
  }
  for (double& v : var) v /= n;
  return var;
}

McDropoutEstimate mc_dropout_variance(const belief::BeliefTracker& tracker,
                                      std::span<const double> user_embedding,
                                      const nn::Tensor& history_attributes,
                                      std::span<const double> feedback, std::size_t passes,
                                      std::uint64_t seed) {
  if (passes == 0) throw ConfigError("MC-dropout needs at least one pass");
  McDropoutEstimate est;
  est.samples.reserve(passes);
  for (std::size_t i = 0; i < passes; ++i) {
    Rng rng(derive_seed(seed, {i}));
    est.samples.push_back(tracker.beliefs(user_embedding, history_attributes, feedback,
                                          nn::Mode::kMcDropout, &rng));
  }
  est.variance = population_variance(est.samples);
  est.normalized = normalize_min_max(est.variance);
  return est;
}

std::vector<double> midpoint_proximity_raw(std::span<const double> beliefs) {
  std::vector<double> r(beliefs.size());
  for (std::size_t p = 0; p < beliefs.size(); ++p) r[p] = 1.0 - 2.0 * std::abs(beliefs[p] - 0.5);
  return r;
}

std::vector<double> midpoint_proximity(std::span<const double> beliefs) {
  return normalize_min_max(midpoint_proximity_raw(beliefs));
}

std::vector<double> fuse_uncertainty(std::span<const double> r, std::span<const double> sigma) {
  if (r.size() != sigma.size()) throw ConfigError("uncertainty vectors differ in length");
  std::vector<double> u(r.size(), 0.0);
  for (std::size_t p = 0; p < r.size(); ++p) {
    const double sum = r[p] + sigma[p];
    u[p] = sum > 0.0 ? 2.0 * r[p] * sigma[p] / sum : 0.0;
  }
  return u;
}

std::optional<AttributeId> select_query_attribute(std::span<const double> scores,
                                                  std::span<const double> feedback) {
  if (scores.size() != feedback.size()) {
    throw ConfigError("score and feedback vectors differ in length");
  }
  std::optional<AttributeId> best;
  double best_score = 0.0;
  for (std::size_t p = 0; p < scores.size(); ++p) {
    if (feedback[p] != kUnknown) continue;
    if (!best || scores[p] > best_score) {
      best = AttributeId(p);
      best_score = scores[p];
    }
  }
  return best;
}

}  // namespace convrec::dialogue
