// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "convrec/belief/belief_tracker.hpp"
#include "convrec/ids.hpp"

namespace convrec::dialogue {

/// (x - min) / (max - min); an all-equal (or empty) vector maps to zeros.
std::vector<double> normalize_min_max(std::span<const double> values);

/// Per-component population variance (divides by N) of equally sized samples.
std::vector<double> population_variance(std::span<const std::vector<double>> samples);

struct McDropoutEstimate {
  std::vector<std::vector<double>> samples;  // N belief vectors
  std::vector<double> variance;              // raw, per attribute
  std::vector<double> normalized;            // sigma in [0, 1]
};

/// N stochastic passes of the belief tracker on identical inputs. Pass i uses
/// an rng seeded with derive_seed(seed, {i}), so the result does not depend on
/// evaluation order or on other sessions.
McDropoutEstimate mc_dropout_variance(const belief::BeliefTracker& tracker,
                                      std::span<const double> user_embedding,
                                      const nn::Tensor& history_attributes,
                                      std::span<const double> feedback, std::size_t passes,
                                      std::uint64_t seed);

/// 1 - 2|q_p - 0.5| before normalisation.
std::vector<double> midpoint_proximity_raw(std::span<const double> beliefs);
/// r = Norm(1 - 2|q - 0.5|).
std::vector<double> midpoint_proximity(std::span<const double> beliefs);

/// u_p = 2 r_p s_p / (r_p + s_p), and 0 when r_p + s_p = 0.
std::vector<double> fuse_uncertainty(std::span<const double> proximity,
                                     std::span<const double> sigma);

/// argmax of `scores` over attributes whose feedback is still unknown; ties go
/// to the lower id. nullopt when every attribute has been answered.
std::optional<AttributeId> select_query_attribute(std::span<const double> scores,
                                                  std::span<const double> feedback);

}  // namespace convrec::dialogue
