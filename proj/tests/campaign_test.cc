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

#include <set>
#include <sstream>

#include "absl/strings/str_split.h"
#include "gtest/gtest.h"
#include "snipfuzz/corpus.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/findings_log.h"
#include "snipfuzz/loopback_transport.h"
#include "snipfuzz/report.h"
#include "snipfuzz/segmentation.h"

namespace snipfuzz {
namespace {

mock::DeviceProfile Load(const std::string& name) {
  absl::StatusOr<mock::DeviceProfile> p = mock::LoadDeviceProfile(
      std::string(SNIPFUZZ_DATA_DIR) + "/profiles/" + name + ".json");
  EXPECT_TRUE(p.ok()) << p.status();
  return p.ok() ? *p : mock::DeviceProfile{};
}

SeedCorpus LoadCorpus(const std::string& name) {
  absl::StatusOr<SeedCorpus> c = LoadSeedCorpus(
      std::string(SNIPFUZZ_DATA_DIR) + "/corpora/" + name + ".json");
  EXPECT_TRUE(c.ok()) << c.status();
  return c.ok() ? *c : SeedCorpus{};
}

SeedCorpus OneSeed(std::string_view message) {
  SeedCorpus c;
  c.seeds.push_back({"s0", {ToBytes(message)}, {}, {}});
  return c;
}

CampaignConfig Fast(uint64_t seed = 1) {
  CampaignConfig c;
  c.rng_seed = seed;
  c.target.probe_repeat_interval_ms = 0;
  c.target.boot_wait_ms = 0;
  return c;
}

// Device, transport and restart hook for one in-process campaign.
struct Lab {
  explicit Lab(const std::string& profile)
      : device(Load(profile)), transport(device), restarter(device) {}
  mock::MockDevice device;
  mock::LoopbackTransport transport;
  mock::DeviceResetRestarter restarter;
};

TEST(Campaign, OnTrueMessageCategories) {
  Lab lab("hue_light");
  Campaign campaign(Fast(), OneSeed(R"({"on":true})"), lab.transport, &lab.restarter);
  absl::StatusOr<DeterminationResult> d = campaign.Determine("s0", 0);
  ASSERT_TRUE(d.ok()) << d.status();
  EXPECT_TRUE(d->complete);
  const ResponsePool* pool = campaign.pool("s0", 0);
  ASSERT_NE(pool, nullptr);
  // Success, format error, and one unknown-parameter reply per key byte.
  EXPECT_GE(pool->size(), 3u);
  EXPECT_NE(ToString(pool->Find(0)->representative.bytes).find("success"),
            std::string::npos);
  ASSERT_EQ(d->byte_categories.size(), 11u);
  EXPECT_EQ(d->byte_categories[0], d->byte_categories[1]);
  EXPECT_NE(d->byte_categories[2], d->byte_categories[0]);
  EXPECT_NE(d->byte_categories[2], d->byte_categories[3]);
  // Every new probe category reserved a seed.
  EXPECT_EQ(d->new_seeds.size(), pool->size() - 1);
  const Seed* reserved = campaign.corpus().Find(d->new_seeds.front());
  ASSERT_NE(reserved, nullptr);
  EXPECT_EQ(reserved->origin.kind, SeedOrigin::Kind::kNewCategory);
  EXPECT_EQ(reserved->origin.parent, "s0");
}

TEST(Campaign, TransmissionAccounting) {
  for (const char* profile : {"hue_light", "hue_light_faulty"}) {
    Lab lab(profile);
    CampaignConfig config = Fast();
    config.exec_budget = 2500;
    Campaign campaign(config, LoadCorpus("hue_schedule"), lab.transport, &lab.restarter);
    FuzzReport r = campaign.Run();
    const TransmissionStats& tx = r.stats.tx;
    EXPECT_EQ(tx.total(), lab.transport.transmissions()) << profile;
    EXPECT_EQ(r.stats.executions,
              tx.baseline + tx.probes + tx.mutations + tx.confirmations);
    EXPECT_EQ(r.stats.executions, 2500u);
    EXPECT_EQ(r.stats.stop_reason, "exec_budget");
    EXPECT_EQ(r.stats.categories, r.timeline.empty() ? 0 : r.timeline.back().categories);
  }
}

TEST(Campaign, FaultyDeviceYieldsConformingCrashes) {
  Lab lab("hue_light_faulty");
  CampaignConfig config = Fast(2);
  config.exec_budget = 3000;
  Campaign campaign(config, LoadCorpus("hue_schedule"), lab.transport, &lab.restarter);
  FuzzReport r = campaign.Run();
  ASSERT_FALSE(r.findings.empty());
  for (const CrashRecord& c : r.findings) {
    EXPECT_EQ(c.verdict, Verdict::kCrash);
    EXPECT_TRUE(IsConformingCrashTimeline(c.timeline));
    // Replaying the sequence on a fresh device hangs it again.
    mock::MockDevice fresh(Load("hue_light_faulty"));
    for (const Message& m : c.sequence) fresh.Handle(m);
    EXPECT_TRUE(fresh.hung());
  }
  EXPECT_EQ(r.stats.stop_reason, "exec_budget");
}

TEST(Campaign, ZeroBudgetRunsNothing) {
  Lab lab("hue_light");
  CampaignConfig config = Fast();
  config.exec_budget = 0;
  Campaign campaign(config, LoadCorpus("hue_light"), lab.transport, &lab.restarter);
  FuzzReport r = campaign.Run();
  EXPECT_EQ(r.stats.executions, 0u);
  EXPECT_EQ(lab.transport.transmissions(), 0u);
  EXPECT_TRUE(r.findings.empty());
  EXPECT_EQ(r.stats.stop_reason, "exec_budget");
  // An empty campaign still yields a well-formed report.
  EXPECT_EQ(ReportToJson(r)["findings"].size(), 0u);
  EXPECT_EQ(TimelineCsv(r), "timestamp_s,cumulative_categories\n");
}

TEST(Campaign, TimeBudget) {
  Lab lab("hue_light");
  CampaignConfig config = Fast();
  config.time_budget_s = 0.2;
  Campaign campaign(config, LoadCorpus("hue_light"), lab.transport, &lab.restarter);
  FuzzReport r = campaign.Run();
  EXPECT_EQ(r.stats.stop_reason, "time_budget");
  EXPECT_LT(r.stats.elapsed_ms, 2000);
}

TEST(Campaign, QueueDrainsOnSmallInputs) {
  Lab lab("bulb_custombyte");
  CampaignConfig config = Fast();
  config.mutation.havoc_budget = 20;
  Campaign campaign(config, LoadCorpus("bulb_custombyte"), lab.transport, &lab.restarter);
  FuzzReport r = campaign.Run();
  EXPECT_EQ(r.stats.stop_reason, "queue_empty");
  EXPECT_GT(r.stats.categories, 3u);
  EXPECT_EQ(r.stats.tx.total(), lab.transport.transmissions());
}

TEST(Campaign, NoSnippetModeNeverProbes) {
  Lab lab("hue_light");
  CampaignConfig config = Fast();
  config.mode = Mode::kNoSnippet;
  config.exec_budget = 500;
  Campaign campaign(config, LoadCorpus("hue_light"), lab.transport, &lab.restarter);
  FuzzReport r = campaign.Run();
  EXPECT_EQ(r.stats.tx.probes, 0u);
  EXPECT_TRUE(r.annotations.empty());
  EXPECT_GT(r.stats.tx.mutations, 0u);
}

TEST(Campaign, RestoreAfterEveryTest) {
  Lab lab("hue_light");
  SeedCorpus corpus = OneSeed(R"({"bri":1})");
  corpus.restoring_sequence = {ToBytes(R"({"bri":254})")};
  CampaignConfig config = Fast();
  config.exec_budget = 40;
  Campaign campaign(config, corpus, lab.transport, &lab.restarter);
  FuzzReport r = campaign.Run();
  EXPECT_EQ(r.stats.tx.restores, r.stats.executions);
  EXPECT_EQ(lab.device.state().at("bri"), "254");
}

TEST(Campaign, MutateNeedsAnnotations) {
  Lab lab("hue_light");
  Campaign campaign(Fast(), OneSeed("{}"), lab.transport, &lab.restarter);
  EXPECT_TRUE(IsError(campaign.Mutate("s0", 0).status(), ErrorKind::kInvalidSnippet));
  EXPECT_TRUE(IsError(campaign.Determine("nope", 0).status(), ErrorKind::kInvalidSnippet));
}

TEST(Campaign, UnconfirmedCrashStopsTheCampaign) {
  mock::MockDevice device(Load("hue_light_faulty"));
  mock::LoopbackTransport transport(device);
  CampaignConfig config = Fast();
  config.exec_budget = 3000;
  Campaign campaign(config, LoadCorpus("hue_schedule"), transport, nullptr);
  FuzzReport r = campaign.Run();
  ASSERT_EQ(r.findings.size(), 1u);
  EXPECT_EQ(r.findings[0].verdict, Verdict::kCrashUnconfirmed);
  EXPECT_EQ(r.stats.stop_reason, "target_unresponsive");
}

std::string StableReport(const FuzzReport& r) { return ReportToJson(r, false).dump(); }

TEST(FindingsLog, ReplayReproducesTheCampaign) {
  std::stringstream stream;
  FuzzReport original;
  {
    Lab lab("hue_light_faulty");
    CampaignConfig config = Fast(5);
    config.exec_budget = 1500;
    FindingsLog log(&stream);
    Campaign campaign(config, LoadCorpus("hue_schedule"), lab.transport,
                      &lab.restarter, &log);
    original = campaign.Run();
  }
  absl::StatusOr<LoggedCampaign> logged = ReadFindingsLog(stream);
  ASSERT_TRUE(logged.ok()) << logged.status();
  EXPECT_EQ(logged->executions, 1500u);
  EXPECT_EQ(logged->execs.size(), 1500u);
  EXPECT_EQ(logged->crashes, original.findings.size());
  EXPECT_EQ(logged->stop_reason, "exec_budget");

  Lab lab("hue_light_faulty");
  ReplayResult replay = Replay(*logged, lab.transport, &lab.restarter);
  EXPECT_EQ(replay.divergences, 0u);
  EXPECT_FALSE(replay.first_divergence.has_value());
  EXPECT_EQ(StableReport(replay.report), StableReport(original));
}

TEST(FindingsLog, ReplayDetectsADifferentTarget) {
  std::stringstream stream;
  {
    Lab lab("hue_light");
    CampaignConfig config = Fast(5);
    config.exec_budget = 300;
    FindingsLog log(&stream);
    Campaign(config, LoadCorpus("hue_light"), lab.transport, &lab.restarter, &log).Run();
  }
  absl::StatusOr<LoggedCampaign> logged = ReadFindingsLog(stream);
  ASSERT_TRUE(logged.ok());
  // Random reply tokens change categories and therefore the path taken.
  Lab other("hue_light_noisy");
  ReplayResult replay = Replay(*logged, other.transport, &other.restarter);
  EXPECT_GT(replay.divergences, 0u);
  ASSERT_TRUE(replay.first_divergence.has_value());
}

TEST(FindingsLog, PlanJsonRoundTrip) {
  MutationPlan plan;
  plan.seed = "s3";
  plan.message_index = 1;
  plan.round = 2;
  plan.targets = {{0, MutationScheme::Repeat(16)}, {4, MutationScheme::Dictionary(3)}};
  plan.havoc = true;
  plan.rng_seed = 0xffffffffffffffffULL;
  absl::StatusOr<MutationPlan> back = PlanFromJson(PlanToJson(plan));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, plan);
}

TEST(FindingsLog, TruncatedLogStillReads) {
  std::stringstream stream;
  {
    Lab lab("hue_light");
    CampaignConfig config = Fast();
    config.exec_budget = 50;
    FindingsLog log(&stream);
    Campaign(config, OneSeed(R"({"on":true})"), lab.transport, &lab.restarter, &log).Run();
  }
  std::vector<std::string> lines = absl::StrSplit(stream.str(), '\n', absl::SkipEmpty());
  std::stringstream cut;
  for (size_t i = 0; i + 1 < lines.size(); ++i) cut << lines[i] << "\n";
  absl::StatusOr<LoggedCampaign> logged = ReadFindingsLog(cut);
  ASSERT_TRUE(logged.ok()) << logged.status();
  EXPECT_EQ(logged->executions, 50u);
  std::stringstream garbage("not json\n");
  EXPECT_FALSE(ReadFindingsLog(garbage).ok());
}

TEST(Report, DeterministicAndMonotone) {
  auto run = [] {
    Lab lab("hue_light_noisy");
    CampaignConfig config = Fast(9);
    config.exec_budget = 1200;
    return Campaign(config, LoadCorpus("hue_light"), lab.transport, &lab.restarter).Run();
  };
  const FuzzReport a = run(), b = run();
  EXPECT_EQ(StableReport(a), StableReport(b));
  for (size_t i = 1; i < a.timeline.size(); ++i) {
    EXPECT_GE(a.timeline[i].categories, a.timeline[i - 1].categories);
  }
  // CSV timestamps strictly increase.
  std::vector<std::string> rows = absl::StrSplit(TimelineCsv(a), '\n', absl::SkipEmpty());
  ASSERT_GT(rows.size(), 1u);
  double last = -1;
  for (size_t i = 1; i < rows.size(); ++i) {
    const double t = std::stod(rows[i].substr(0, rows[i].find(',')));
    EXPECT_GT(t, last);
    last = t;
  }
  const nlohmann::ordered_json j = ReportToJson(a, true);
  EXPECT_TRUE(j["stats"]["transmissions"]["reconciled"].get<bool>());
  EXPECT_TRUE(j["stats"].contains("elapsed_ms"));
  EXPECT_FALSE(ReportToJson(a, false)["stats"].contains("elapsed_ms"));
}

TEST(Report, WritesAllFiles) {
  Lab lab("hue_light");
  CampaignConfig config = Fast();
  config.exec_budget = 100;
  const FuzzReport r =
      Campaign(config, OneSeed(R"({"on":true})"), lab.transport, &lab.restarter).Run();
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "snipfuzz_report_test";
  std::filesystem::remove_all(dir);
  ASSERT_TRUE(WriteReport(r, dir).ok());
  for (const char* f : {"report.json", "summary.txt", "timeline.csv",
                        "annotations.jsonl", "corpus.json"}) {
    EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  }
  // The written corpus is loadable as a seed corpus.
  EXPECT_TRUE(LoadSeedCorpus(dir / "corpus.json").ok());
  std::filesystem::remove_all(dir);
}

TEST(Segmentation, Properties) {
  const ByteLabels a{1, 0, 1, 1}, b{0, 0, 1, 0};
  EXPECT_DOUBLE_EQ(*SegmentationSimilarity(a, a), 1.0);
  EXPECT_DOUBLE_EQ(*SegmentationSimilarity(a, {0, 1, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(*SegmentationSimilarity(a, b), 0.5);
  EXPECT_DOUBLE_EQ(*SegmentationSimilarity(a, b), *SegmentationSimilarity(b, a));
  EXPECT_DOUBLE_EQ(*SegmentationSimilarity({}, {}), 1.0);
  EXPECT_TRUE(IsError(SegmentationSimilarity(a, {1}).status(), ErrorKind::kLengthMismatch));
}

TEST(Segmentation, DominantCategoryAndDataFlags) {
  EXPECT_EQ(DominantCategory({1, 1, 2, 3, 1, kNonResponsive, kNonResponsive,
                              kNonResponsive, kNonResponsive}),
            1);
  EXPECT_EQ(DominantCategory({2, 1}), 1);
  EXPECT_EQ(DominantCategory({kNonResponsive}), kNonResponsive);

  ClusterRound round;
  round.snippets = *ApplyPartition(ToBytes(R"({"on":true})"), {2, 4}, {1, 4, 1}, 0, 1);
  round.members = {{1, {1}}, {4, {2, 3}}};
  EXPECT_EQ(DataFlags(round, 1), (std::vector<bool>{false, true, false}));
}

TEST(Segmentation, EvaluatePicksBestRound) {
  Annotation coarse{"s0", 0, 2, 4, {}, {5}, {false}};
  Annotation fine{"s0", 0, 1, 4, {1, 3}, {1, 2, 1}, {false, true, false}};
  const std::vector<GroundTruth> truth{{"s0", 0, {0, 1, 1, 0}}};
  absl::StatusOr<SegmentationEvaluation> e = EvaluateSegmentation({coarse, fine}, truth);
  ASSERT_TRUE(e.ok()) << e.status();
  ASSERT_EQ(e->messages.size(), 1u);
  EXPECT_EQ(e->messages[0].best_round, 1);
  EXPECT_DOUBLE_EQ(e->messages[0].similarity, 1.0);

  std::stringstream lines(AnnotationToJsonLine(fine) + "\n");
  absl::StatusOr<std::vector<Annotation>> back = ReadAnnotations(lines);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ((*back)[0].Labels(), fine.Labels());
  std::stringstream truth_lines(GroundTruthToJsonLine(truth[0]) + "\n");
  absl::StatusOr<std::vector<GroundTruth>> truth_back = ReadGroundTruth(truth_lines);
  ASSERT_TRUE(truth_back.ok());
  EXPECT_EQ((*truth_back)[0].labels, truth[0].labels);

  const std::vector<GroundTruth> wrong{{"s0", 0, {0, 1}}};
  EXPECT_TRUE(IsError(EvaluateSegmentation({fine}, wrong).status(),
                      ErrorKind::kLengthMismatch));
  EXPECT_DOUBLE_EQ(Median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(Median({4, 1, 2, 3}), 2.5);
}

}  // namespace
}  // namespace snipfuzz
