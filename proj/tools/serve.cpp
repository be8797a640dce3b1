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

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <inquire.hpp>

#ifndef INQUIRE_RESOURCE_DIR
#define INQUIRE_RESOURCE_DIR "resources"
#endif

namespace fs = std::filesystem;

namespace {

httplib::Server* g_server = nullptr;

void handle_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interactive question-planning session server"};
  std::vector<std::string> datasets;
  std::string config_path;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string generator_kind = "oracle";
  std::string templates_dir = std::string(INQUIRE_RESOURCE_DIR) + "/templates";
  std::string script;
  std::string snapshot_dir;
  int snapshot_interval = 0;
  std::string static_dir;

  app.add_option("--dataset", datasets, "Dataset JSON file or directory of *.json datasets")->required();
  app.add_option("--config", config_path, "Config JSON")->check(CLI::ExistingFile);
  app.add_option("--host", host, "Bind address");
  app.add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  app.add_option("--generator", generator_kind, "Question generator")->check(CLI::IsMember({"oracle", "llm"}));
  app.add_option("--templates", templates_dir, "Prompt template directory");
  app.add_option("--script", script, "Scripted chat responses (JSON) instead of an HTTP provider");
  app.add_option("--snapshot-dir", snapshot_dir, "Persist trees and clusters here");
  app.add_option("--snapshot-interval", snapshot_interval, "Also snapshot every N seconds (0 = only after sessions)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--static", static_dir, "Serve a static UI bundle from this directory at /")
      ->check(CLI::ExistingDirectory);
  CLI11_PARSE(app, argc, argv);

  try {
    using namespace inquire;
    const auto config = config_path.empty() ? Config{} : load_config(config_path);

    std::vector<fs::path> files;
    for (const auto& d : datasets) {
      if (fs::is_directory(d)) {
        for (const auto& entry : fs::directory_iterator(d)) {
          if (entry.path().extension() == ".json" && entry.path().filename() != "config.json") {
            files.push_back(entry.path());
          }
        }
      } else {
        files.emplace_back(d);
      }
    }
    std::sort(files.begin(), files.end());

    CallCounters counters;
    std::unique_ptr<ChatProvider> chat;
    if (!script.empty()) {
      auto scripted = std::make_unique<ScriptedChatProvider>();
      scripted->load_file(script);
      chat = std::move(scripted);
    } else if (generator_kind == "llm" || std::getenv("INQUIRE_LLM_URL")) {
      chat = std::make_unique<HttpChatProvider>(ProviderSettings::from_env());
    }
    std::unique_ptr<LlmGateway> gateway = chat ? std::make_unique<LlmGateway>(*chat, counters) : nullptr;
    const auto templates = TemplateRegistry::load_directory(templates_dir);
    HashedBagOfWords embedder;

    SessionService::Options options;
    options.config = config;
    options.embedder = &embedder;
    options.gateway = gateway.get();
    options.templates = &templates;
    if (gateway) options.classifier = make_llm_answer_classifier(*gateway);
    if (!snapshot_dir.empty()) options.snapshot_dir = snapshot_dir;

    SessionService service(std::move(options), [&](DatasetState& state) -> std::unique_ptr<QuestionGenerator> {
      if (generator_kind == "llm") {
        return std::make_unique<LlmGenerator>(*gateway, templates, state.dataset.domain, state.dataset.catalog);
      }
      return std::make_unique<OracleGenerator>(state.dataset.catalog, state.dataset.attribute_questions, &counters);
    });
    for (const auto& f : files) {
      service.add_dataset(load_dataset(f));
      std::cerr << "loaded dataset " << f.string() << '\n';
    }

    httplib::Server server;
    service.bind(server);
    if (!static_dir.empty()) server.set_mount_point("/", static_dir);

    std::mutex stop_mutex;
    std::condition_variable stop_cv;
    bool stopping = false;
    std::thread snapshotter;
    if (snapshot_interval > 0 && !snapshot_dir.empty()) {
      snapshotter = std::thread([&] {
        std::unique_lock lock(stop_mutex);
        while (!stop_cv.wait_for(lock, std::chrono::seconds(snapshot_interval), [&] { return stopping; })) {
          service.snapshot_all();
        }
      });
    }

    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cerr << "listening on http://" << host << ':' << port << '\n';
    const bool ok = server.listen(host, port);

    {
      std::lock_guard lock(stop_mutex);
      stopping = true;
    }
    stop_cv.notify_all();
    if (snapshotter.joinable()) snapshotter.join();
    service.snapshot_all();
    if (!ok) {
      std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
