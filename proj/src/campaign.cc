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

#include "snipfuzz/campaign.h"

#include <sstream>
#include <thread>

#include "absl/strings/str_cat.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/mutation.h"
#include "snipfuzz/snippet_inference.h"
#include "spdlog/spdlog.h"

namespace snipfuzz {

namespace {

using Clock = std::chrono::steady_clock;

MonitorConfig MonitorConfigFor(const CampaignConfig& c) {
  MonitorConfig m;
  m.resend_attempts = c.resend_attempts;
  m.boot_wait_ms = c.target.boot_wait_ms;
  return m;
}

}  // namespace

Campaign::Campaign(CampaignConfig config, SeedCorpus corpus,
                   Transport& transport, Restarter* restarter, FindingsLog* log)
    : config_(std::move(config)),
      corpus_(std::move(corpus)),
      transport_(transport),
      monitor_(transport, restarter, MonitorConfigFor(config_)),
      log_(log),
      rng_(config_.rng_seed),
      start_(Clock::now()) {
  next_seed_number_ = corpus_.seeds.size();
  for (const Seed& s : corpus_.seeds) queue_.push_back(s.id);
}

int64_t Campaign::ElapsedMs() const {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start_)
      .count();
}

bool Campaign::BudgetLeft() {
  if (stopped_) return false;
  if (config_.exec_budget && stats_.executions >= *config_.exec_budget) {
    stopped_ = true;
    stats_.stop_reason = "exec_budget";
    return false;
  }
  if (config_.time_budget_s &&
      static_cast<double>(ElapsedMs()) >= *config_.time_budget_s * 1000.0) {
    stopped_ = true;
    stats_.stop_reason = "time_budget";
    return false;
  }
  return true;
}

ResponsePool& Campaign::PoolFor(const SeedId& seed, size_t message_index) {
  auto key = std::make_pair(seed, message_index);
  auto it = pools_.find(key);
  if (it == pools_.end()) {
    it = pools_.emplace(key, ResponsePool(seed, message_index)).first;
  }
  return it->second;
}

const ResponsePool* Campaign::pool(const SeedId& seed,
                                   size_t message_index) const {
  auto it = pools_.find({seed, message_index});
  return it == pools_.end() ? nullptr : &it->second;
}

Seed Campaign::SeedCopy(const SeedId& id) const {
  const Seed* s = corpus_.Find(id);
  return s != nullptr ? *s : Seed{};
}

void Campaign::RecordCrash(const MessageSequence& sequence, const SeedId& seed,
                           size_t message_index, const MutationPlan* plan,
                           bool during_restore,
                           const DetectionResult& detection) {
  CrashRecord crash;
  crash.sequence = sequence;
  if (plan != nullptr) crash.plan = *plan;
  crash.seed = seed;
  crash.message_index = message_index;
  crash.exec = stats_.executions;
  crash.during_restore = during_restore;
  crash.verdict = detection.verdict;
  crash.timeline = detection.timeline;
  if (log_ != nullptr) log_->Crash(crash);
  spdlog::info("exec {}: {} on seed {} message {}{}", crash.exec,
               VerdictName(crash.verdict), seed, message_index,
               during_restore ? " (seen during restore)" : "");
  findings_.push_back(std::move(crash));

  if (detection.verdict == Verdict::kCrashUnconfirmed) {
    // Without a working restart hook the target stays down.
    stopped_ = true;
    stats_.stop_reason = "target_unresponsive";
    return;
  }
  // The confirmation resend left the target crashed again.
  if (absl::Status st = monitor_.Recover(); !st.ok()) {
    spdlog::error("recovery after crash failed: {}", st.ToString());
    stopped_ = true;
    stats_.stop_reason = "target_unresponsive";
  }
}

void Campaign::Restore(const MessageSequence& test, const SeedId& seed,
                       size_t message_index, const MutationPlan* plan,
                       bool& crashed) {
  if (corpus_.restoring_sequence.empty() || stopped_) return;
  ++stats_.tx.restores;
  RestoreOutcome restore = RestoreDevice(monitor_, corpus_.restoring_sequence);
  if (!restore.escalation) return;
  stats_.tx.crash_resends += static_cast<uint64_t>(restore.escalation->resends);
  if (restore.escalation->verdict == Verdict::kNoCrash) return;
  // The restoring sequence is known-good; blame the test that preceded it.
  crashed = true;
  RecordCrash(test, seed, message_index, plan, true, *restore.escalation);
}

Campaign::ExecResult Campaign::Execute(const MessageSequence& sequence,
                                       ExecKind kind, const SeedId& seed,
                                       size_t message_index, size_t probe,
                                       const MutationPlan* plan) {
  ExecResult result;
  if (!BudgetLeft()) return result;
  ++stats_.executions;
  switch (kind) {
    case ExecKind::kBaseline: ++stats_.tx.baseline; break;
    case ExecKind::kProbe: ++stats_.tx.probes; break;
    case ExecKind::kMutation:
    case ExecKind::kHavoc:
    case ExecKind::kNoSnippet: ++stats_.tx.mutations; break;
    case ExecKind::kConfirm: ++stats_.tx.confirmations; break;
  }
  if (log_ != nullptr) {
    ExecRecord r{stats_.executions, kind, seed, message_index, probe,
                 plan != nullptr ? std::optional<MutationPlan>(*plan) : std::nullopt,
                 sequence};
    log_->Exec(r);
  }

  bool crashed = false;
  std::vector<Response> responses;
  SendOutcome outcome = monitor_.Send(sequence);
  if (outcome.ok()) {
    responses = std::move(outcome.responses);
  } else {
    DetectionResult detection =
        monitor_.DetectCrash(sequence, outcome.timeout_index);
    stats_.tx.crash_resends += static_cast<uint64_t>(detection.resends);
    if (detection.verdict == Verdict::kNoCrash) {
      responses = std::move(detection.responses);
    } else {
      crashed = true;
      RecordCrash(sequence, seed, message_index, plan, false, detection);
    }
  }
  Restore(sequence, seed, message_index, plan, crashed);

  if (crashed || responses.size() <= message_index) {
    result.outcome = Outcome::kCrash;
    return result;
  }
  result.outcome = Outcome::kResponse;
  result.response = std::move(responses[message_index]);
  return result;
}

void Campaign::OnNewCategory(const MessageSequence& sequence,
                             const SeedId& seed, size_t message_index,
                             CategoryId category) {
  ++stats_.categories;
  timeline_.push_back({ElapsedMs(), stats_.executions, stats_.categories});
  if (log_ != nullptr) {
    log_->Category(seed, message_index, category, stats_.executions);
  }
  // Category 0 comes from the unmodified seed itself; nothing new to keep.
  if (category == 0) return;
  Seed reserved;
  do {
    reserved.id = absl::StrCat("s", next_seed_number_++);
  } while (corpus_.Find(reserved.id) != nullptr);
  reserved.sequence = sequence;
  reserved.origin = SeedOrigin::NewCategory(seed, message_index, category);
  if (log_ != nullptr) log_->NewSeed(reserved, stats_.executions);
  queue_.push_back(reserved.id);
  corpus_.seeds.push_back(std::move(reserved));
  ++stats_.seeds_added;
}

bool Campaign::Baseline(const Seed& seed, size_t message_index) {
  ResponsePool& pool = PoolFor(seed.id, message_index);
  if (pool.size() > 0) return true;
  ExecResult first = Execute(seed.sequence, ExecKind::kBaseline, seed.id,
                             message_index, 0, nullptr);
  if (first.outcome != Outcome::kResponse) return false;
  if (config_.target.probe_repeat_interval_ms > 0) {
    std::this_thread::sleep_for(
        std::chrono::milliseconds(config_.target.probe_repeat_interval_ms));
  }
  ExecResult second = Execute(seed.sequence, ExecKind::kBaseline, seed.id,
                              message_index, 0, nullptr);
  if (second.outcome != Outcome::kResponse) return false;
  Classification c =
      pool.Classify(first.response, second.response, seed.sequence[message_index]);
  if (c.is_new()) {
    OnNewCategory(seed.sequence, seed.id, message_index, c.category);
  }
  return true;
}

absl::StatusOr<DeterminationResult> Campaign::Determine(const SeedId& seed_id,
                                                        size_t message_index) {
  const Seed seed = SeedCopy(seed_id);
  if (seed.id.empty() || message_index >= seed.sequence.size()) {
    return MakeError(ErrorKind::kInvalidSnippet, "no message ", message_index,
                     " in seed \"", seed_id, "\"");
  }
  const Message& message = seed.sequence[message_index];
  absl::StatusOr<ProbeSet> probes = GenerateProbes(message);
  if (!probes.ok()) return probes.status();

  DeterminationResult result;
  if (!Baseline(seed, message_index)) return result;
  ResponsePool& pool = PoolFor(seed.id, message_index);

  result.byte_categories.assign(message.size(), kNonResponsive);
  for (const Probe& probe : probes->probes) {
    MessageSequence sequence = seed.sequence;
    sequence[message_index] = probe.message;
    ExecResult first = Execute(sequence, ExecKind::kProbe, seed.id,
                               message_index, probe.index, nullptr);
    if (first.outcome == Outcome::kStopped) return result;
    if (first.outcome == Outcome::kCrash) {
      ++result.crashes;
      continue;
    }
    if (config_.target.probe_repeat_interval_ms > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.target.probe_repeat_interval_ms));
    }
    ExecResult second = Execute(sequence, ExecKind::kProbe, seed.id,
                                message_index, probe.index, nullptr);
    if (second.outcome == Outcome::kStopped) return result;
    if (second.outcome == Outcome::kCrash) {
      ++result.crashes;
      continue;
    }
    Classification c =
        pool.Classify(first.response, second.response, probe.message);
    result.byte_categories[probe.index - 1] = c.category;
    if (c.is_new()) {
      const size_t before = corpus_.seeds.size();
      OnNewCategory(sequence, seed.id, message_index, c.category);
      if (corpus_.seeds.size() > before) {
        result.new_seeds.push_back(corpus_.seeds.back().id);
      }
    }
  }

  absl::StatusOr<SnippetSet> initial =
      InitialSnippets(message, result.byte_categories, message_index);
  if (!initial.ok()) return initial.status();
  absl::StatusOr<ClusteringResult> clustering =
      HierarchicalCluster(message, *initial, pool);
  if (!clustering.ok()) return clustering.status();
  Seed* stored = corpus_.Find(seed.id);
  stored->snippet_annotations[message_index] =
      DedupSnippetSets(clustering->SnippetSets());
  for (Annotation& a : AnnotateRounds(seed.id, message_index, message.size(),
                                      result.byte_categories, *clustering)) {
    annotations_.push_back(std::move(a));
  }
  result.complete = true;
  return result;
}

Campaign::MutantResult Campaign::RunMutant(const MessageSequence& sequence,
                                           const SeedId& seed,
                                           size_t message_index,
                                           const MutationPlan* plan,
                                           ExecKind kind) {
  ExecResult first =
      Execute(sequence, kind, seed, message_index, 0, plan);
  if (first.outcome == Outcome::kStopped) return MutantResult::kStopped;
  if (first.outcome == Outcome::kCrash) return MutantResult::kCrash;
  ResponsePool& pool = PoolFor(seed, message_index);
  if (pool.MatchKnown(first.response)) return MutantResult::kKnown;
  // Unmatched so far: measure the response's own variability before
  // deciding it is new.
  ExecResult second =
      Execute(sequence, ExecKind::kConfirm, seed, message_index, 0, plan);
  if (second.outcome == Outcome::kStopped) return MutantResult::kStopped;
  if (second.outcome == Outcome::kCrash) return MutantResult::kCrash;
  Classification c =
      pool.Classify(first.response, second.response, sequence[message_index]);
  if (!c.is_new()) return MutantResult::kKnown;
  OnNewCategory(sequence, seed, message_index, c.category);
  return MutantResult::kNew;
}

absl::StatusOr<StageSummary> Campaign::Mutate(const SeedId& seed_id,
                                              size_t message_index) {
  const Seed seed = SeedCopy(seed_id);
  auto it = seed.snippet_annotations.find(message_index);
  if (it == seed.snippet_annotations.end() || it->second.empty()) {
    return MakeError(ErrorKind::kInvalidSnippet, "seed \"", seed_id,
                     "\" message ", message_index, " has no snippet annotation");
  }
  const std::vector<SnippetSet>& sets = it->second;
  StageSummary summary;
  auto tally = [&](MutantResult r) {
    if (r == MutantResult::kNew) ++summary.new_categories;
    if (r == MutantResult::kCrash) ++summary.crashes;
  };

  for (const MutationPlan& plan :
       EnumeratePlans(seed, message_index, sets, config_.mutation)) {
    absl::StatusOr<MessageSequence> sequence =
        ApplyPlan(seed, plan, config_.mutation);
    if (!sequence.ok()) {
      ++summary.plans_skipped;
      continue;
    }
    MutantResult r = RunMutant(*sequence, seed.id, message_index, &plan,
                               ExecKind::kMutation);
    if (r == MutantResult::kStopped) break;
    ++summary.plans_executed;
    tally(r);
  }

  // Havoc: random multi-snippet plans until something new (or a crash)
  // turns up or the havoc budget is spent.
  HavocStream havoc(seed, message_index, sets, config_.mutation, rng_);
  while (!stopped_) {
    auto next = havoc.Next();
    if (std::holds_alternative<BudgetExhausted>(next)) {
      summary.havoc_exhausted = true;
      break;
    }
    const MutationPlan& plan = std::get<MutationPlan>(next);
    absl::StatusOr<MessageSequence> sequence =
        ApplyPlan(seed, plan, config_.mutation);
    if (!sequence.ok()) {
      ++summary.plans_skipped;
      continue;
    }
    MutantResult r =
        RunMutant(*sequence, seed.id, message_index, &plan, ExecKind::kHavoc);
    if (r == MutantResult::kStopped) break;
    ++summary.plans_executed;
    ++summary.havoc_plans;
    tally(r);
    if (r == MutantResult::kNew || r == MutantResult::kCrash) break;
  }
  stats_.plans_executed += summary.plans_executed;
  stats_.plans_skipped += summary.plans_skipped;
  return summary;
}

void Campaign::RunNoSnippet(const SeedId& seed_id, size_t message_index) {
  const Seed seed = SeedCopy(seed_id);
  if (!Baseline(seed, message_index)) return;
  for (uint64_t i = 0; i < config_.mutation.havoc_budget && !stopped_; ++i) {
    MessageSequence sequence = seed.sequence;
    sequence[message_index] = NoSnippetMutate(sequence[message_index], rng_);
    MutantResult r = RunMutant(sequence, seed.id, message_index, nullptr,
                               ExecKind::kNoSnippet);
    if (r == MutantResult::kStopped) break;
    ++stats_.plans_executed;
    if (r == MutantResult::kNew || r == MutantResult::kCrash) break;
  }
}

FuzzReport Campaign::Run() {
  start_ = Clock::now();
  if (log_ != nullptr) log_->Header(config_, corpus_);
  while (!queue_.empty() && BudgetLeft()) {
    const SeedId id = queue_.front();
    queue_.pop_front();
    const size_t messages = SeedCopy(id).sequence.size();
    for (size_t i = 0; i < messages && !stopped_; ++i) {
      if (config_.mode == Mode::kNoSnippet) {
        RunNoSnippet(id, i);
        continue;
      }
      absl::StatusOr<DeterminationResult> determined = Determine(id, i);
      if (!determined.ok()) {
        spdlog::warn("seed {} message {}: {}", id, i,
                     determined.status().ToString());
        continue;
      }
      if (!determined->complete) continue;
      absl::StatusOr<StageSummary> mutated = Mutate(id, i);
      if (!mutated.ok()) {
        spdlog::warn("seed {} message {}: {}", id, i,
                     mutated.status().ToString());
      }
    }
  }
  if (stats_.stop_reason.empty()) stats_.stop_reason = "queue_empty";
  FuzzReport report = Report();
  if (log_ != nullptr) {
    log_->Summary(report.stats.executions, report.stats.transport_transmissions,
                  report.stats.stop_reason);
  }
  return report;
}

FuzzReport Campaign::Report() const {
  FuzzReport report;
  report.config = config_;
  report.stats = stats_;
  report.stats.tx.reconnect_resends = monitor_.reconnect_resends();
  report.stats.transport_transmissions = transport_.transmissions();
  report.stats.elapsed_ms = ElapsedMs();
  report.timeline = timeline_;
  report.findings = findings_;
  report.corpus = corpus_;
  report.annotations = annotations_;
  return report;
}

ReplayResult Replay(const LoggedCampaign& logged, Transport& transport,
                    Restarter* restarter) {
  CampaignConfig config = logged.config;
  config.exec_budget = logged.executions;
  config.time_budget_s.reset();
  std::stringstream stream;
  FindingsLog log(&stream);
  Campaign campaign(config, logged.corpus, transport, restarter, &log);
  ReplayResult result;
  result.report = campaign.Run();
  // Echo the original budgets rather than the replay's.
  result.report.config = logged.config;
  if (!logged.stop_reason.empty()) {
    result.report.stats.stop_reason = logged.stop_reason;
  }
  absl::StatusOr<LoggedCampaign> replayed = ReadFindingsLog(stream);
  if (replayed.ok()) result.execs = replayed->execs;
  const size_t n = std::max(result.execs.size(), logged.execs.size());
  for (size_t i = 0; i < n; ++i) {
    const bool same = i < result.execs.size() && i < logged.execs.size() &&
                      result.execs[i] == logged.execs[i];
    if (!same) {
      ++result.divergences;
      if (!result.first_divergence) result.first_divergence = i + 1;
    }
  }
  return result;
}

}  // namespace snipfuzz
