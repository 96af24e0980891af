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

#ifndef SNIPFUZZ_FINDINGS_LOG_H_
#define SNIPFUZZ_FINDINGS_LOG_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "snipfuzz/config.h"
#include "snipfuzz/message.h"
#include "snipfuzz/monitor.h"
#include "snipfuzz/mutation.h"

namespace snipfuzz {

// What a test transmission was for.
enum class ExecKind { kBaseline, kProbe, kMutation, kHavoc, kConfirm, kNoSnippet };
std::string ExecKindName(ExecKind kind);

struct ExecRecord {
  uint64_t exec = 0;
  ExecKind kind = ExecKind::kBaseline;
  SeedId seed;
  size_t message_index = 0;
  // kProbe: 1-based deleted byte.
  size_t probe = 0;
  std::optional<MutationPlan> plan;
  MessageSequence sequence;

  friend bool operator==(const ExecRecord&, const ExecRecord&) = default;
};

nlohmann::ordered_json PlanToJson(const MutationPlan& plan);
absl::StatusOr<MutationPlan> PlanFromJson(const nlohmann::ordered_json& j);
nlohmann::ordered_json CrashToJson(const CrashRecord& crash, bool with_times);

// JSON-lines event stream of a campaign. The first line is a header holding
// the configuration and the starting corpus, which is enough to re-run the
// campaign; the exec lines let a replay check it took the same path.
class FindingsLog {
 public:
  // `out` may be null, in which case nothing is written.
  explicit FindingsLog(std::ostream* out) : out_(out) {}

  void Header(const CampaignConfig& config, const SeedCorpus& corpus);
  void Exec(const ExecRecord& record);
  void Category(const SeedId& seed, size_t message_index, CategoryId category,
                uint64_t exec);
  void NewSeed(const Seed& seed, uint64_t exec);
  void Crash(const CrashRecord& crash);
  void Summary(uint64_t executions, uint64_t transmissions,
               const std::string& stop_reason);

 private:
  void Write(const nlohmann::ordered_json& j);
  std::ostream* out_;
};

struct LoggedCampaign {
  CampaignConfig config;
  SeedCorpus corpus;
  std::vector<ExecRecord> execs;
  size_t crashes = 0;
  // From the summary line, or the number of exec lines if the log was cut.
  uint64_t executions = 0;
  std::string stop_reason;
};

absl::StatusOr<LoggedCampaign> ReadFindingsLog(std::istream& in);
absl::StatusOr<LoggedCampaign> ReadFindingsLog(const std::filesystem::path& path);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_FINDINGS_LOG_H_
