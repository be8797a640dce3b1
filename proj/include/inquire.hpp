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

#pragma once

#include "inquire/bench.hpp"
#include "inquire/cluster.hpp"
#include "inquire/config.hpp"
#include "inquire/core_types.hpp"
#include "inquire/dataset.hpp"
#include "inquire/errors.hpp"
#include "inquire/generators.hpp"
#include "inquire/http_providers.hpp"
#include "inquire/llm_gateway.hpp"
#include "inquire/question_tree.hpp"
#include "inquire/rewards.hpp"
#include "inquire/search.hpp"
#include "inquire/service.hpp"
#include "inquire/session.hpp"
#include "inquire/snapshot.hpp"
#include "inquire/text.hpp"
