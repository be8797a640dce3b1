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

#include <stdexcept>
#include <string>
#include <vector>

namespace inquire {

// Every error raised by the library derives from Error so callers can catch
// broadly at process boundaries (CLI, HTTP handlers).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define INQUIRE_DEFINE_ERROR(Name)            \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

// core-types
INQUIRE_DEFINE_ERROR(RejectedPartition);
INQUIRE_DEFINE_ERROR(DatasetError);
// rewards
INQUIRE_DEFINE_ERROR(DomainError);
// question-tree snapshots
INQUIRE_DEFINE_ERROR(VersionMismatch);
INQUIRE_DEFINE_ERROR(CorruptSnapshot);
// generators and gateway
INQUIRE_DEFINE_ERROR(GenerationFailed);
INQUIRE_DEFINE_ERROR(ParseFailed);
INQUIRE_DEFINE_ERROR(ProviderError);
INQUIRE_DEFINE_ERROR(TemplateNotFound);
// clustering
INQUIRE_DEFINE_ERROR(DimensionMismatch);
// sessions
INQUIRE_DEFINE_ERROR(SessionClosed);
INQUIRE_DEFINE_ERROR(NoCandidates);
INQUIRE_DEFINE_ERROR(UninterpretableAnswer);
// benchmark
INQUIRE_DEFINE_ERROR(EmptyDataset);
INQUIRE_DEFINE_ERROR(ConfigError);

#undef INQUIRE_DEFINE_ERROR

class MissingPlaceholder : public Error {
 public:
  explicit MissingPlaceholder(std::vector<std::string> names)
      : Error(make_message(names)), names_(std::move(names)) {}

  const std::vector<std::string>& names() const noexcept { return names_; }

 private:
  static std::string make_message(const std::vector<std::string>& names) {
    std::string msg = "unbound template placeholder(s):";
    for (const auto& n : names) msg += " " + n;
    return msg;
  }

  std::vector<std::string> names_;
};

}  // namespace inquire
