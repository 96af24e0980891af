// Copyright 2026 The snipfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SNIPFUZZ_CONFIG_H_
#define SNIPFUZZ_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "snipfuzz/mutation.h"
#include "snipfuzz/transport.h"

namespace snipfuzz {

enum class Mode {
  kSnippet,    // probe, cluster, mutate snippets
  kNoSnippet,  // byte-blind random mutation, no snippet determination
};

std::string ModeName(Mode mode);
absl::StatusOr<Mode> ParseMode(std::string_view name);

struct CampaignConfig {
  TargetConfig target;
  std::string corpus_path;
  Mode mode = Mode::kSnippet;
  // Unset budgets are unlimited. A zero budget runs nothing.
  std::optional<double> time_budget_s;
  std::optional<uint64_t> exec_budget;
  MutationConfig mutation;
  // Mandatory: every random choice derives from it.
  uint64_t rng_seed = 0;
  std::string out_dir = "out";
  int resend_attempts = 3;

  absl::Status Validate() const;
};

// JSON encoding. Byte strings (dictionary entries, framing delimiters) are
// lowercase hex. `rng_seed` must be present when parsing.
nlohmann::ordered_json ConfigToJson(const CampaignConfig& config);
absl::StatusOr<CampaignConfig> ConfigFromJson(const nlohmann::ordered_json& j);
absl::StatusOr<CampaignConfig> LoadConfig(const std::filesystem::path& path);

// "host:port" -> host, port.
absl::Status ParseTargetAddress(std::string_view text, TargetConfig& target);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_CONFIG_H_
