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

// Terminal game: think of one outcome from a dataset and answer the
// planner's questions with yes / no. Confirm a correct guess with "yes".

#include <iostream>
#include <string>

#include <inquire.hpp>

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: play <dataset.json> [config.json]\n";
    return 2;
  }
  try {
    using namespace inquire;
    const auto config = argc > 2 ? load_config(argv[2]) : Config{};
    DatasetState state(load_dataset(argv[1]), config);
    OracleGenerator generator(state.dataset.catalog, state.dataset.attribute_questions);
    const auto templates = TemplateRegistry::load_directory(std::string(INQUIRE_RESOURCE_DIR) + "/templates");
    SessionServices services{&generator, nullptr, nullptr, &templates, {}};

    std::cout << "Think of one of:";
    for (const auto& o : state.dataset.catalog.outcomes()) std::cout << ' ' << o.label << ';';
    std::cout << "\nAnswer yes or no.\n";

    Session session("play", state, services, config, SetMode::kClosed, "", config.search.rng_seed);
    auto out = session.advance();
    std::string line;
    while (session.status() == Status::kActive && out.question) {
      std::cout << "[" << (session.turn() + 1) << "] " << *out.question << "\n> " << std::flush;
      if (!std::getline(std::cin, line)) return 0;
      try {
        out = session.advance(line);
      } catch (const UninterpretableAnswer&) {
        std::cout << "Please answer yes or no.\n";
      }
    }
    if (session.status() == Status::kSuccess) {
      std::cout << "Found '" << session.success_label() << "' in " << session.turn() << " questions.\n";
    } else {
      std::cout << "Out of questions.\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
