// Copyright 2026 The Inquire Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <inquire.hpp>

#ifndef INQUIRE_RESOURCE_DIR
#define INQUIRE_RESOURCE_DIR "resources"
#endif

namespace fs = std::filesystem;

namespace {

struct RunArgs {
  std::string dataset;
  std::string config;
  std::string generator = "oracle";
  std::string mode = "closed";
  std::string answerer = "simulated";
  std::string embedder = "hashed";
  std::string snapshot;
  std::string report;
  std::string templates = std::string(INQUIRE_RESOURCE_DIR) + "/templates";
  std::string script;
  int repeat = 1;
  std::optional<std::uint64_t> shuffle_seed;
  bool quiet = false;
};

fs::path cluster_snapshot_path(const fs::path& tree) {
  auto p = tree;
  p.replace_extension(".clusters.json");
  return p;
}

/// Chat provider selected by flags: a scripted replay file, or the HTTP
/// endpoint described by the INQUIRE_LLM_* environment variables.
std::unique_ptr<inquire::ChatProvider> make_chat_provider(const RunArgs& args) {
  if (!args.script.empty()) {
    auto scripted = std::make_unique<inquire::ScriptedChatProvider>();
    scripted->load_file(args.script);
    return scripted;
  }
  return std::make_unique<inquire::HttpChatProvider>(inquire::ProviderSettings::from_env());
}

int run(const RunArgs& args) {
  using namespace inquire;
  auto config = args.config.empty() ? Config{} : load_config(args.config);
  const auto mode = parse_mode(args.mode);
  if (!mode) throw ConfigError("invalid mode: " + args.mode);

  DatasetState state(load_dataset(args.dataset), config);
  const fs::path tree_path = args.snapshot;
  if (!args.snapshot.empty()) {
    if (fs::exists(tree_path)) state.registry = snapshot_load(tree_path);
    if (fs::exists(cluster_snapshot_path(tree_path))) state.clusters = load_clusters(cluster_snapshot_path(tree_path));
  }

  CallCounters counters;
  const bool needs_model = args.generator == "llm" || args.answerer == "llm" || *mode != SetMode::kClosed;
  std::unique_ptr<ChatProvider> chat;
  std::unique_ptr<LlmGateway> gateway;
  std::optional<TemplateRegistry> templates;
  if (needs_model || fs::is_directory(args.templates)) templates = TemplateRegistry::load_directory(args.templates);
  if (needs_model) {
    chat = make_chat_provider(args);
    gateway = std::make_unique<LlmGateway>(*chat, counters);
  }

  std::unique_ptr<QuestionGenerator> generator;
  if (args.generator == "oracle") {
    generator = std::make_unique<OracleGenerator>(state.dataset.catalog, state.dataset.attribute_questions, &counters);
  } else if (args.generator == "llm") {
    generator = std::make_unique<LlmGenerator>(*gateway, *templates, state.dataset.domain, state.dataset.catalog);
  } else {
    throw ConfigError("invalid generator: " + args.generator);
  }

  std::unique_ptr<EmbeddingProvider> embedder;
  if (args.embedder == "hashed") {
    embedder = std::make_unique<HashedBagOfWords>();
  } else if (args.embedder == "http") {
    embedder = std::make_unique<HttpEmbeddingProvider>(ProviderSettings::from_env());
  } else if (args.embedder != "none") {
    throw ConfigError("invalid embedder: " + args.embedder);
  }

  SessionServices services{generator.get(), embedder.get(), gateway.get(), templates ? &*templates : nullptr, {}};
  if (gateway) services.classifier = make_llm_answer_classifier(*gateway);

  BenchmarkOptions options;
  options.mode = *mode;
  if (args.shuffle_seed) {
    options.shuffle = true;
    options.shuffle_seed = *args.shuffle_seed;
  }
  if (args.answerer == "llm") {
    options.answerer_factory = [&](const Sample& sample) {
      auto answerer = std::make_shared<LlmAnswerer>(*gateway, *templates, state.dataset.domain, sample.target);
      return std::function<std::string(const Session&, const std::string&)>(
          [answerer](const Session&, const std::string& question) { return answerer->answer(question); });
    };
  } else if (args.answerer != "simulated") {
    throw ConfigError("invalid answerer: " + args.answerer);
  }

  nlohmann::json runs = nlohmann::json::array();
  for (int i = 0; i < args.repeat; ++i) {
    const auto report = run_benchmark(state, config, services, counters, options);
    if (!args.quiet) {
      if (args.repeat > 1) std::cout << "run " << (i + 1) << '\n';
      std::cout << report_table(report);
    }
    runs.push_back(report_to_json(report));
  }

  if (!args.snapshot.empty()) {
    snapshot_save(state.registry, tree_path);
    save_clusters(state.clusters, cluster_snapshot_path(tree_path));
  }
  if (!args.report.empty()) {
    nlohmann::json doc = args.repeat == 1 ? runs.front() : nlohmann::json{{"runs", runs}};
    doc["config"] = config_to_json(config);
    doc["mode"] = args.mode;
    doc["generator"] = args.generator;
    doc["other_calls"] = counters.other_calls.load();
    std::ofstream out(args.report);
    if (!out) throw inquire::Error("cannot write report: " + args.report);
    out << doc.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark harness for tree-search question planning"};
  app.require_subcommand(1);

  RunArgs args;
  auto* run_cmd = app.add_subcommand("run", "Run every sample of a dataset through full sessions");
  run_cmd->add_option("--dataset", args.dataset, "Dataset JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--config", args.config, "Config JSON")->check(CLI::ExistingFile);
  run_cmd->add_option("--generator", args.generator, "Question generator")
      ->check(CLI::IsMember({"oracle", "llm"}));
  run_cmd->add_option("--mode", args.mode, "Possibility-set mode")
      ->check(CLI::IsMember({"closed", "open", "constrained"}));
  run_cmd->add_option("--answerer", args.answerer, "Answer source")->check(CLI::IsMember({"simulated", "llm"}));
  run_cmd->add_option("--embedder", args.embedder, "Description embedder")
      ->check(CLI::IsMember({"hashed", "http", "none"}));
  run_cmd->add_option("--snapshot", args.snapshot,
                      "Tree snapshot path, loaded if present and written after the run; clusters go next to it");
  run_cmd->add_option("--report", args.report, "Write the JSON report here");
  run_cmd->add_option("--templates", args.templates, "Prompt template directory");
  run_cmd->add_option("--script", args.script, "Scripted chat responses (JSON) instead of an HTTP provider");
  run_cmd->add_option("--repeat", args.repeat, "Run the dataset this many times on the same tree")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--shuffle-seed", args.shuffle_seed, "Shuffle sample order with this seed");
  run_cmd->add_flag("--quiet", args.quiet, "Suppress the table");

  std::uint64_t m = 0;
  std::uint64_t ds = 0;
  std::uint64_t k = 0;
  bool bounds_json = false;
  auto* bounds_cmd = app.add_subcommand("qgc-bounds", "Question-generation call bounds for exhaustive and tree search");
  bounds_cmd->add_option("--m", m, "Questions generated per expansion")->required()->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--ds", ds, "Simulation depth")->required()->check(CLI::PositiveNumber);
  bounds_cmd->add_option("--k", k, "Search iterations per turn")->required()->check(CLI::PositiveNumber);
  bounds_cmd->add_flag("--json", bounds_json, "Print JSON instead of a table");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(args);
    const auto b = inquire::qgc_bounds(m, ds, k);
    if (bounds_json) {
      std::cout << nlohmann::json{{"exhaustive_first", b.exhaustive_first},
                                  {"exhaustive_subsequent", b.exhaustive_subsequent},
                                  {"mcts_max_per_turn", b.mcts_max_per_turn}}
                       .dump()
                << '\n';
    } else {
      std::cout << "exhaustive_first       " << b.exhaustive_first << '\n'
                << "exhaustive_subsequent  " << b.exhaustive_subsequent << '\n'
                << "mcts_max_per_turn      " << b.mcts_max_per_turn << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
