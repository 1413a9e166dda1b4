// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace convrec::sim {

/// Outcome of one conversation as far as the metrics are concerned.
struct EpisodeOutcome {
  bool success = false;
  std::size_t turn = 0;  // termination turn, counted from the opening turn 1
};

struct MetricsReport {
  std::size_t episodes = 0;
  std::size_t max_turns = 0;
  std::vector<double> success_rate;  // [T - 1] = SR@T for T = 1..max_turns
  double average_turn = 0.0;

  double sr_at(std::size_t turn) const;  // throws UsageError outside 1..max_turns
};

/// SR@T = share of episodes that succeeded by turn T. AT averages the success
/// turn, counting a failure as max_turns. Throws UsageError for no episodes.
MetricsReport evaluate(std::span<const EpisodeOutcome> outcomes, std::size_t max_turns);

/// "turn,sr" rows for T = 1..max_turns, then an "AT" row.
void write_metrics_csv(std::ostream& out, const MetricsReport& report);
/// One SR@T column per named report, then an AT row.
void write_metrics_csv(std::ostream& out, std::span<const std::string> names,
                       std::span<const MetricsReport> reports);
/// Aligned text table for terminals.
void print_metrics(std::ostream& out, std::span<const std::string> names,
                   std::span<const MetricsReport> reports);

}  // namespace convrec::sim
