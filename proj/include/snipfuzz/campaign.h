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

#ifndef SNIPFUZZ_CAMPAIGN_H_
#define SNIPFUZZ_CAMPAIGN_H_

#include <chrono>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "snipfuzz/config.h"
#include "snipfuzz/findings_log.h"
#include "snipfuzz/message.h"
#include "snipfuzz/monitor.h"
#include "snipfuzz/segmentation.h"
#include "snipfuzz/similarity.h"
#include "snipfuzz/transport.h"

namespace snipfuzz {

struct TimelinePoint {
  int64_t t_ms = 0;
  uint64_t exec = 0;
  uint64_t categories = 0;
};

// Every SendSequence call the campaign caused, by purpose. Test sends are
// the first four; the sum must equal the transport's own counter.
struct TransmissionStats {
  uint64_t baseline = 0;
  uint64_t probes = 0;
  uint64_t mutations = 0;
  uint64_t confirmations = 0;
  uint64_t restores = 0;
  uint64_t crash_resends = 0;
  uint64_t reconnect_resends = 0;

  uint64_t total() const {
    return baseline + probes + mutations + confirmations + restores +
           crash_resends + reconnect_resends;
  }
};

struct CampaignStats {
  // Test transmissions (baseline, probe, mutation and confirmation sends).
  uint64_t executions = 0;
  // Sum of distinct categories over all response pools.
  uint64_t categories = 0;
  uint64_t seeds_added = 0;
  uint64_t plans_executed = 0;
  uint64_t plans_skipped = 0;
  TransmissionStats tx;
  // Reported by the transport; equals tx.total() when accounting holds.
  uint64_t transport_transmissions = 0;
  int64_t elapsed_ms = 0;
  std::string stop_reason;
};

struct FuzzReport {
  CampaignConfig config;
  CampaignStats stats;
  std::vector<TimelinePoint> timeline;
  std::vector<CrashRecord> findings;
  // Final corpus including reserved seeds and their origins.
  SeedCorpus corpus;
  std::vector<Annotation> annotations;
};

struct DeterminationResult {
  std::vector<CategoryId> byte_categories;
  std::vector<SeedId> new_seeds;
  size_t crashes = 0;
  // False when the budget ran out before every probe was classified.
  bool complete = false;
};

struct StageSummary {
  uint64_t plans_executed = 0;
  uint64_t plans_skipped = 0;
  uint64_t havoc_plans = 0;
  uint64_t new_categories = 0;
  uint64_t crashes = 0;
  bool havoc_exhausted = false;
};

// One fuzzing campaign against one target (the workflow: determine the
// snippets of each seed message from probe responses, then mutate them, with
// every new response category reserving its sequence as a new seed).
class Campaign {
 public:
  Campaign(CampaignConfig config, SeedCorpus corpus, Transport& transport,
           Restarter* restarter, FindingsLog* log = nullptr);

  // Runs until the queue drains or a budget is spent.
  FuzzReport Run();

  // Individual stages, for tests and the `infer` command.
  absl::StatusOr<DeterminationResult> Determine(const SeedId& seed,
                                                size_t message_index);
  absl::StatusOr<StageSummary> Mutate(const SeedId& seed, size_t message_index);

  FuzzReport Report() const;
  const SeedCorpus& corpus() const { return corpus_; }
  const ResponsePool* pool(const SeedId& seed, size_t message_index) const;
  const std::vector<CrashRecord>& findings() const { return findings_; }
  const CampaignStats& stats() const { return stats_; }
  bool stopped() const { return stopped_; }

 private:
  enum class Outcome { kResponse, kCrash, kStopped };
  struct ExecResult {
    Outcome outcome = Outcome::kStopped;
    Response response;
  };
  enum class MutantResult { kKnown, kNew, kCrash, kStopped };

  bool BudgetLeft();
  int64_t ElapsedMs() const;
  ExecResult Execute(const MessageSequence& sequence, ExecKind kind,
                     const SeedId& seed, size_t message_index, size_t probe,
                     const MutationPlan* plan);
  void RecordCrash(const MessageSequence& sequence, const SeedId& seed,
                   size_t message_index, const MutationPlan* plan,
                   bool during_restore, const DetectionResult& detection);
  void Restore(const MessageSequence& test, const SeedId& seed,
               size_t message_index, const MutationPlan* plan, bool& crashed);
  // Baseline pair for a message; false when it did not yield a category.
  bool Baseline(const Seed& seed, size_t message_index);
  MutantResult RunMutant(const MessageSequence& sequence, const SeedId& seed,
                         size_t message_index, const MutationPlan* plan,
                         ExecKind kind);
  void OnNewCategory(const MessageSequence& sequence, const SeedId& seed,
                     size_t message_index, CategoryId category);
  ResponsePool& PoolFor(const SeedId& seed, size_t message_index);
  void RunNoSnippet(const SeedId& seed, size_t message_index);
  Seed SeedCopy(const SeedId& id) const;

  CampaignConfig config_;
  SeedCorpus corpus_;
  Transport& transport_;
  CrashMonitor monitor_;
  FindingsLog* log_;
  std::mt19937_64 rng_;
  std::map<std::pair<SeedId, size_t>, ResponsePool> pools_;
  std::deque<SeedId> queue_;
  std::vector<TimelinePoint> timeline_;
  std::vector<CrashRecord> findings_;
  std::vector<Annotation> annotations_;
  CampaignStats stats_;
  uint64_t next_seed_number_ = 0;
  std::chrono::steady_clock::time_point start_;
  bool stopped_ = false;
};

struct ReplayResult {
  FuzzReport report;
  // Exec records of the log that the replay did not reproduce.
  size_t divergences = 0;
  std::optional<uint64_t> first_divergence;
  std::vector<ExecRecord> execs;
};

// Re-runs a logged campaign from its header (same config, corpus and rng
// seed) for exactly the logged number of executions, and checks every
// transmission against the log.
ReplayResult Replay(const LoggedCampaign& logged, Transport& transport,
                    Restarter* restarter);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_CAMPAIGN_H_
