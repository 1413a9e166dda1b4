// SPDX-License-Identifier: Apache-2.0
// convrec: train, simulate and serve the conversational recommender.

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <pthread.h>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "convrec/config/pipeline.hpp"
#include "convrec/config/run_config.hpp"
#include "convrec/datasets/synthetic.hpp"
#include "convrec/errors.hpp"
#include "convrec/service/http_server.hpp"
#include "convrec/service/session_manager.hpp"
#include "convrec/simulation/runner.hpp"
#include "convrec/simulation/strategies.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kRnCheckpoint = "rn.ckpt";
constexpr const char* kBtnCheckpoint = "btn.ckpt";

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> strategy;
  std::optional<double> alpha;
  std::optional<std::size_t> episodes;
  fs::path out_dir = "out";
  fs::path models;  // checkpoint directory; defaults to out_dir
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration (JSON)");
  cmd->add_option("--seed", c.seed, "seed for every random stream (default 123)");
  cmd->add_option("--jobs", c.jobs, "parallel episodes (default 1)");
  cmd->add_option("--strategy", c.strategy, "attribute selection strategy")
      ->check(CLI::IsMember(convrec::sim::strategy_names()));
  cmd->add_option("--alpha", c.alpha, "query threshold on |q - 0.5|");
  cmd->add_option("--episodes", c.episodes, "limit on simulated episodes (0 = all)");
  cmd->add_option("--out-dir", c.out_dir, "output directory");
  cmd->add_option("--models", c.models, "checkpoint directory (default: --out-dir)");
}

convrec::config::RunConfig effective_config(const Common& c) {
  auto config = c.config.empty() ? convrec::config::RunConfig::from_json(json::object())
                                 : convrec::config::RunConfig::load(c.config);
  if (c.seed) config.apply_seed(*c.seed);
  if (c.jobs) config.simulation.jobs = *c.jobs;
  if (c.strategy) config.simulation.strategy = *c.strategy;
  if (c.alpha) config.policy.alpha = *c.alpha;
  if (c.episodes) config.simulation.episodes = *c.episodes;
  config.validate();
  return config;
}

// Prints the effective configuration and keeps a copy next to the outputs.
void echo(const convrec::config::RunConfig& config, const fs::path& out_dir,
          const std::string& command) {
  fs::create_directories(out_dir);
  const json j{{"command", command}, {"config", config.to_json()}};
  std::cout << "# " << j.dump() << std::endl;
  std::ofstream(out_dir / "config.json") << j.dump(2) << '\n';
}

fs::path models_dir(const Common& c) { return c.models.empty() ? c.out_dir : c.models; }

std::shared_ptr<const convrec::dialogue::ModelBundle> load_models(
    const convrec::data::Dataset& ds, const Common& c) {
  const auto dir = models_dir(c);
  for (const char* name : {kRnCheckpoint, kBtnCheckpoint}) {
    if (!fs::exists(dir / name)) {
      throw convrec::ConfigError("models: missing checkpoint " + (dir / name).string() +
                                 " (run train-rn and train-btn first)");
    }
  }
  return convrec::config::load_trained_models(ds, dir / kRnCheckpoint, dir / kBtnCheckpoint);
}

void log_epoch(const char* what, const convrec::rec::EpochRecord& e) {
  std::fprintf(stderr, "%s epoch %zu  train %.6f  validation %.6f  lr %.3g\n", what, e.epoch,
               e.train_loss, e.validation_loss, e.learning_rate);
}

json epochs_json(const std::vector<convrec::rec::EpochRecord>& epochs) {
  json out = json::array();
  for (const auto& e : epochs) {
    out.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"validation_loss", e.validation_loss},
                   {"learning_rate", e.learning_rate}});
  }
  return out;
}

int train_rn(const Common& c) {
  const auto config = effective_config(c);
  echo(config, c.out_dir, "train-rn");
  const auto ds = convrec::config::load_run_dataset(config);
  auto trained = convrec::config::train_recommender(
      ds, config, [](const auto& e) { log_epoch("rn", e); });
  convrec::dialogue::save_recommender(c.out_dir / kRnCheckpoint, trained.rn, trained.store,
                                      ds.catalog);
  const json report{{"initial_validation_loss", trained.report.initial_validation_loss},
                    {"final_validation_loss", trained.report.final_validation_loss},
                    {"steps", trained.report.steps},
                    {"refresh_steps", trained.report.refresh_steps},
                    {"epochs", epochs_json(trained.report.epochs)}};
  std::ofstream(c.out_dir / "train_rn.json") << report.dump(2) << '\n';
  std::printf("rn: validation loss %.6f -> %.6f, checkpoint %s\n",
              trained.report.initial_validation_loss, trained.report.final_validation_loss,
              (c.out_dir / kRnCheckpoint).string().c_str());
  return 0;
}

int train_btn(const Common& c) {
  const auto config = effective_config(c);
  echo(config, c.out_dir, "train-btn");
  const auto ds = convrec::config::load_run_dataset(config);
  const auto rn_path = models_dir(c) / kRnCheckpoint;
  if (!fs::exists(rn_path)) {
    throw convrec::ConfigError("models: missing " + rn_path.string() + " (run train-rn first)");
  }
  const auto store = convrec::config::load_embedding_store(rn_path);
  auto trained = convrec::config::train_belief_tracker(
      ds, store, config, [](const auto& e) { log_epoch("btn", e); });
  convrec::dialogue::save_belief_tracker(c.out_dir / kBtnCheckpoint, trained.btn);
  const json report{{"initial_validation_loss", trained.report.initial_validation_loss},
                    {"final_validation_loss", trained.report.final_validation_loss},
                    {"steps", trained.report.steps},
                    {"epochs", epochs_json(trained.report.epochs)}};
  std::ofstream(c.out_dir / "train_btn.json") << report.dump(2) << '\n';
  std::printf("btn: validation loss %.6f -> %.6f, checkpoint %s\n",
              trained.report.initial_validation_loss, trained.report.final_validation_loss,
              (c.out_dir / kBtnCheckpoint).string().c_str());
  return 0;
}

struct Run {
  std::string strategy;
  std::vector<convrec::sim::EpisodeResult> results;
  convrec::sim::MetricsReport report;
};

Run run_strategy(const std::shared_ptr<const convrec::dialogue::ModelBundle>& models,
                 const convrec::config::RunConfig& config, const convrec::data::Dataset& ds,
                 const std::string& strategy) {
  const auto engine = convrec::config::make_engine(models, config, strategy);
  const auto specs = convrec::sim::episodes_from_log(ds.splits.test, config.simulation.episodes);
  if (specs.empty()) throw convrec::ConfigError("split.test: the test split has no interactions");
  Run run{strategy, {}, {}};
  run.results = convrec::sim::run_episodes(engine, specs, config.seed, config.simulation.jobs);
  run.report = convrec::sim::evaluate(run.results, config.policy.max_turns);
  return run;
}

void write_outputs(const fs::path& out_dir, const std::vector<Run>& runs, bool transcripts) {
  std::vector<std::string> names;
  std::vector<convrec::sim::MetricsReport> reports;
  for (const auto& r : runs) {
    names.push_back(r.strategy);
    reports.push_back(r.report);
  }
  {
    std::ofstream out(out_dir / "metrics.csv");
    if (runs.size() == 1) {
      convrec::sim::write_metrics_csv(out, runs[0].report);
    } else {
      convrec::sim::write_metrics_csv(out, names, reports);
    }
  }
  if (transcripts) {
    std::ofstream out(out_dir / "transcript.jsonl");
    for (const auto& r : runs) {
      for (const auto& episode : r.results) {
        auto j = convrec::sim::to_json(episode);
        j["strategy"] = r.strategy;
        out << j.dump() << '\n';
      }
    }
  }
  convrec::sim::print_metrics(std::cout, names, reports);
}

int simulate(const Common& c) {
  const auto config = effective_config(c);
  echo(config, c.out_dir, "simulate");
  const auto ds = convrec::config::load_run_dataset(config);
  const auto models = load_models(ds, c);
  write_outputs(c.out_dir, {run_strategy(models, config, ds, config.simulation.strategy)},
                config.simulation.transcripts);
  return 0;
}

int ablate(const Common& c) {
  const auto config = effective_config(c);
  echo(config, c.out_dir, "ablate");
  const auto ds = convrec::config::load_run_dataset(config);
  const auto models = load_models(ds, c);
  std::vector<Run> runs;
  for (const auto& name : convrec::sim::ablation_strategies()) {
    runs.push_back(run_strategy(models, config, ds, name));
  }
  write_outputs(c.out_dir, runs, config.simulation.transcripts);
  return 0;
}

// Recomputes metrics from a transcript; one column per strategy found.
int evaluate(const Common& c, const fs::path& transcript) {
  const auto config = effective_config(c);
  echo(config, c.out_dir, "evaluate");
  std::ifstream in(transcript);
  if (!in) throw convrec::ConfigError("transcript: cannot open " + transcript.string());
  std::vector<std::string> names;
  std::vector<std::vector<convrec::sim::EpisodeOutcome>> outcomes;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw convrec::ConfigError(transcript.string() + ":" + std::to_string(line_no) + ": " +
                                 e.what());
    }
    if (!j.contains("success") || !j["success"].is_boolean() || !j.contains("turns") ||
        !j["turns"].is_number_unsigned()) {
      throw convrec::ConfigError(transcript.string() + ":" + std::to_string(line_no) +
                                 ": expected boolean 'success' and integer 'turns'");
    }
    const std::string name = j.value("strategy", config.simulation.strategy);
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      names.push_back(name);
      outcomes.emplace_back();
      it = names.end() - 1;
    }
    outcomes[static_cast<std::size_t>(it - names.begin())].push_back(
        {j["success"].get<bool>(), j["turns"].get<std::size_t>()});
  }
  std::vector<Run> runs;
  for (std::size_t s = 0; s < names.size(); ++s) {
    runs.push_back({names[s], {}, convrec::sim::evaluate(outcomes[s], config.policy.max_turns)});
  }
  if (runs.empty()) throw convrec::ConfigError("transcript: no episodes in " + transcript.string());
  write_outputs(c.out_dir, runs, false);
  return 0;
}

int export_relations(const Common& c, std::optional<std::size_t> user) {
  const auto config = effective_config(c);
  echo(config, c.out_dir, "export-relations");
  const auto ds = convrec::config::load_run_dataset(config);
  const auto models = load_models(ds, c);
  std::optional<convrec::UserId> who;
  if (user) who = convrec::UserId(*user);
  const auto relation = convrec::config::export_relation(*models, who);
  std::ofstream out(c.out_dir / "relations.csv");
  const std::size_t p = relation.size();
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.9f", relation(i, j));
      out << (j ? "," : "") << buf;
    }
    out << '\n';
  }
  std::printf("relations: %zu x %zu grid written to %s\n", p, p,
              (c.out_dir / "relations.csv").string().c_str());
  return 0;
}

int serve(const Common& c, std::optional<std::string> host, std::optional<int> port) {
  auto config = effective_config(c);
  if (host) config.service.host = *host;
  if (port) config.service.port = *port;
  echo(config, c.out_dir, "serve");
  const auto ds = convrec::config::load_run_dataset(config);

  auto try_load = [&]() -> std::shared_ptr<const convrec::dialogue::ModelBundle> {
    try {
      return load_models(ds, c);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "serve: no model loaded: %s\n", e.what());
      return nullptr;
    }
  };

  // Signals are handled by a dedicated thread: SIGHUP reloads the
  // checkpoints, SIGINT and SIGTERM stop the server.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGHUP);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  convrec::service::SessionManagerOptions options;
  options.policy = config.policy;
  options.strategy = config.simulation.strategy;
  options.ranker = config.simulation.ranker;
  options.seed = config.seed;
  options.idle_timeout = std::chrono::minutes(config.service.session_ttl_minutes);
  convrec::service::SessionManager sessions(try_load(), options);
  convrec::service::HttpServer server(sessions);
  const int bound = server.bind(config.service.host, config.service.port);
  std::printf("serving on http://%s:%d\n", config.service.host.c_str(), bound);
  std::fflush(stdout);

  std::jthread watcher([&] {
    for (;;) {
      int sig = 0;
      if (sigwait(&signals, &sig) != 0) continue;
      if (sig == SIGHUP) {
        if (auto fresh = try_load()) {
          sessions.swap_models(std::move(fresh));
          std::fprintf(stderr, "serve: models reloaded\n");
        }
        continue;
      }
      server.stop();
      return;
    }
  });
  server.listen();
  if (watcher.joinable()) {
    // listen() can also end on its own; wake the watcher so it exits.
    pthread_kill(watcher.native_handle(), SIGTERM);
  }
  return 0;
}

int synth(const convrec::data::SyntheticWorldConfig& world, const fs::path& out_dir) {
  const auto generated = convrec::data::generate_world(world);
  const auto manifest = convrec::data::write_world(generated, out_dir);
  std::printf("synthetic world: %zu items, %zu attributes, %zu interactions -> %s\n",
              generated.catalog.num_items(), generated.catalog.num_attributes(),
              generated.log.records.size(), manifest.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convrec: conversational recommendation with belief tracking"};
  app.require_subcommand(1);

  Common common;
  std::vector<CLI::App*> with_common;
  auto* cmd_train_rn = app.add_subcommand("train-rn", "train the recommendation network");
  auto* cmd_train_btn = app.add_subcommand("train-btn", "train the belief tracker");
  auto* cmd_simulate = app.add_subcommand("simulate", "simulate conversations on the test split");
  auto* cmd_ablate = app.add_subcommand("ablate", "compare the attribute selection strategies");
  auto* cmd_evaluate = app.add_subcommand("evaluate", "recompute metrics from a transcript");
  auto* cmd_export = app.add_subcommand("export-relations", "write the learned relation matrix");
  auto* cmd_serve = app.add_subcommand("serve", "run the session API over HTTP");
  for (auto* cmd : {cmd_train_rn, cmd_train_btn, cmd_simulate, cmd_ablate, cmd_evaluate,
                    cmd_export, cmd_serve}) {
    add_common(cmd, common);
  }

  fs::path transcript;
  cmd_evaluate->add_option("--transcript", transcript, "transcript.jsonl to score")->required();
  std::optional<std::size_t> relation_user;
  cmd_export->add_option("--user", relation_user, "one user's matrix instead of the mean");
  std::optional<std::string> host;
  std::optional<int> port;
  cmd_serve->add_option("--host", host, "bind address");
  cmd_serve->add_option("--port", port, "port (0 picks a free one)");

  convrec::data::SyntheticWorldConfig world;
  fs::path synth_out = "data";
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic dataset");
  cmd_synth->add_option("--out-dir", synth_out, "dataset directory");
  cmd_synth->add_option("--seed", world.seed, "generator seed");
  cmd_synth->add_option("--items", world.items);
  cmd_synth->add_option("--attributes", world.attributes);
  cmd_synth->add_option("--clusters", world.clusters);
  cmd_synth->add_option("--users", world.users);
  cmd_synth->add_option("--interactions", world.interactions_per_user, "per user");
  cmd_synth->add_option("--core-fraction", world.core_fraction);
  cmd_synth->add_option("--core-prob", world.core_prob);
  cmd_synth->add_option("--noise", world.noise_prob);
  cmd_synth->add_option("--common", world.common_attributes, "cluster-independent attributes");
  cmd_synth->add_option("--common-prob", world.common_prob);
  cmd_synth->add_option("--affinity", world.affinity);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_train_rn) return train_rn(common);
    if (*cmd_train_btn) return train_btn(common);
    if (*cmd_simulate) return simulate(common);
    if (*cmd_ablate) return ablate(common);
    if (*cmd_evaluate) return evaluate(common, transcript);
    if (*cmd_export) return export_relations(common, relation_user);
    if (*cmd_serve) return serve(common, host, port);
    if (*cmd_synth) return synth(world, synth_out);
  } catch (const convrec::ConfigError& e) {
    std::fprintf(stderr, "convrec: configuration error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "convrec: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
