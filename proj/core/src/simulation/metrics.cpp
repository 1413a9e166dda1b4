// SPDX-License-Identifier: Apache-2.0
#include "convrec/simulation/metrics.hpp"

#include <cstdio>
#include <ostream>
#include <string>

#include "convrec/errors.hpp"

namespace convrec::sim {

namespace {

// Fixed notation keeps the files byte-stable across platforms.
std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

double MetricsReport::sr_at(std::size_t turn) const {
  if (turn < 1 || turn > max_turns) {
    throw UsageError("SR@" + std::to_string(turn) + " outside 1.." + std::to_string(max_turns));
  }
  return success_rate[turn - 1];
}

MetricsReport evaluate(std::span<const EpisodeOutcome> outcomes, std::size_t max_turns) {
  if (outcomes.empty()) throw UsageError("evaluate needs at least one episode");
  if (max_turns == 0) throw UsageError("max_turns must be >= 1");
  std::vector<std::size_t> succeeded_at(max_turns + 1, 0);
  double turns = 0.0;
  for (const auto& o : outcomes) {
    if (o.success) {
      if (o.turn < 1 || o.turn > max_turns) {
        throw InvariantError("success at turn " + std::to_string(o.turn) + " outside 1.." +
                             std::to_string(max_turns));
      }
      ++succeeded_at[o.turn];
      turns += static_cast<double>(o.turn);
    } else {
      turns += static_cast<double>(max_turns);
    }
  }
  MetricsReport r;
  r.episodes = outcomes.size();
  r.max_turns = max_turns;
  const double n = static_cast<double>(outcomes.size());
  std::size_t cumulative = 0;
  for (std::size_t t = 1; t <= max_turns; ++t) {
    cumulative += succeeded_at[t];
    r.success_rate.push_back(static_cast<double>(cumulative) / n);
  }
  r.average_turn = turns / n;
  return r;
}

void write_metrics_csv(std::ostream& out, const MetricsReport& report) {
  const std::string name = "sr";
  write_metrics_csv(out, std::span<const std::string>(&name, 1),
                    std::span<const MetricsReport>(&report, 1));
}

void write_metrics_csv(std::ostream& out, std::span<const std::string> names,
                       std::span<const MetricsReport> reports) {
  if (names.size() != reports.size() || reports.empty()) {
    throw UsageError("metrics table needs one name per report");
  }
  out << "turn";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t t = 1; t <= reports.front().max_turns; ++t) {
    out << t;
    for (const auto& r : reports) out << ',' << fixed(r.sr_at(t));
    out << '\n';
  }
  out << "AT";
  for (const auto& r : reports) out << ',' << fixed(r.average_turn);
  out << '\n';
}

void print_metrics(std::ostream& out, std::span<const std::string> names,
                   std::span<const MetricsReport> reports) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-6s", "T");
  out << buf;
  for (const auto& n : names) {
    std::snprintf(buf, sizeof buf, " %14s", n.c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t t = 1; t <= reports.front().max_turns; ++t) {
    std::snprintf(buf, sizeof buf, "SR@%-3zu", t);
    out << buf;
    for (const auto& r : reports) {
      std::snprintf(buf, sizeof buf, " %14.4f", r.sr_at(t));
      out << buf;
    }
    out << '\n';
  }
  std::snprintf(buf, sizeof buf, "%-6s", "AT");
  out << buf;
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, " %14.4f", r.average_turn);
    out << buf;
  }
  out << "\nepisodes: " << reports.front().episodes << '\n';
}

}  // namespace convrec::sim
