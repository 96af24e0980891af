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

#include "snipfuzz/snippet_inference.h"

#include <random>

#include "gtest/gtest.h"
#include "snipfuzz/errors.h"

namespace snipfuzz {
namespace {

const char kR0[] = R"({"success":{"/lights/1/state/on":true}})";
const char kR1[] =
    R"({"error":{"type":2,"address":"/lights/1/state","description":"body contains invalid json"}})";
const char kR3[] =
    R"({"error":{"type":6,"address":"/lights/1/state/n","description":"parameter, n, not available"}})";
const char kR4[] =
    R"({"error":{"type":6,"address":"/lights/1/state/o","description":"parameter, o, not available"}})";

Response R(std::string_view s) { return Response{ToBytes(s), {}}; }

TEST(GenerateProbes, DeletesEachByteOnce) {
  absl::StatusOr<ProbeSet> probes = GenerateProbes(ToBytes(R"({"on":true})"));
  ASSERT_TRUE(probes.ok());
  ASSERT_EQ(probes->probes.size(), 11u);
  EXPECT_EQ(ToString(probes->probes[0].message), R"("on":true})");
  EXPECT_EQ(ToString(probes->probes[1].message), R"({on":true})");
  EXPECT_EQ(probes->probes[0].index, 1u);
  EXPECT_EQ(probes->probes[10].index, 11u);
}

TEST(GenerateProbes, RejectsEmptyMessage) {
  EXPECT_TRUE(IsError(GenerateProbes({}).status(), ErrorKind::kEmptyMessage));
}

TEST(VectorizeResponse, QuotedVectors) {
  EXPECT_EQ(VectorizeResponse(ToBytes(kR1), 1.0).AsArray(),
            (std::array<double, 5>{1, 91, 10, 2, 10}));
  EXPECT_EQ(VectorizeResponse(ToBytes(kR3), 1.0).AsArray(),
            (std::array<double, 5>{1, 94, 11, 2, 13}));
  EXPECT_EQ(VectorizeResponse(ToBytes(kR4), 1.0).AsArray(),
            (std::array<double, 5>{1, 94, 11, 2, 13}));
}

TEST(VectorizeResponse, WhitespaceSplitsButIsNotCounted) {
  const FeatureVector v = VectorizeResponse(ToBytes("ab cd 12 ::"), 0.5);
  EXPECT_EQ(v.self_similarity, 0.5);
  EXPECT_EQ(v.length, 11u);
  EXPECT_EQ(v.alpha_segments, 2u);
  EXPECT_EQ(v.numeric_segments, 1u);
  EXPECT_EQ(v.symbol_segments, 1u);
  EXPECT_EQ(VectorizeResponse({}, 1.0).length, 0u);
}

TEST(InitialSnippets, MergesRunsOfEqualCategory) {
  absl::StatusOr<SnippetSet> set = InitialSnippets(
      ToBytes(R"({"on":true})"), {1, 1, 2, 3, 1, 1, 1, 1, 1, 1, 1});
  ASSERT_TRUE(set.ok());
  ASSERT_EQ(set->snippets.size(), 4u);
  EXPECT_EQ(set->snippets[0], (Snippet{0, 2, 1}));
  EXPECT_EQ(set->snippets[1], (Snippet{2, 3, 2}));
  EXPECT_EQ(set->snippets[2], (Snippet{3, 4, 3}));
  EXPECT_EQ(set->snippets[3], (Snippet{4, 11, 1}));
  EXPECT_EQ(set->round, 0);
}

TEST(InitialSnippets, LengthMismatchIsAnError) {
  EXPECT_FALSE(InitialSnippets(ToBytes("abc"), {1, 1}).ok());
}

ResponsePool HuePool() {
  const Message m = ToBytes(R"({"on":true})");
  ResponsePool pool("s0", 0);
  pool.Classify(R(kR0), R(kR0), m);
  pool.Classify(R(kR1), R(kR1), m);
  pool.Classify(R(kR3), R(kR3), m);
  pool.Classify(R(kR4), R(kR4), m);
  return pool;
}

TEST(HierarchicalCluster, HueTrace) {
  const Message m = ToBytes(R"({"on":true})");
  ResponsePool pool = HuePool();
  absl::StatusOr<SnippetSet> initial =
      InitialSnippets(m, {1, 1, 2, 3, 1, 1, 1, 1, 1, 1, 1});
  ASSERT_TRUE(initial.ok());
  absl::StatusOr<ClusteringResult> r = HierarchicalCluster(m, *initial, pool);
  ASSERT_TRUE(r.ok()) << r.status();
  ASSERT_EQ(r->history.size(), 2u);
  EXPECT_EQ(r->history[0], (MergeEvent{1, 2, 3, 4, 0.0}));
  EXPECT_EQ(r->history[1].first, 1);
  EXPECT_EQ(r->history[1].second, 4);
  EXPECT_EQ(r->history[1].merged, 5);
  EXPECT_NEAR(r->history[1].distance, std::sqrt(19.0), 1e-12);

  ASSERT_EQ(r->rounds.size(), 3u);
  const SnippetSet& round1 = r->rounds[1].snippets;
  ASSERT_EQ(round1.snippets.size(), 3u);
  EXPECT_EQ(round1.snippets[1], (Snippet{2, 4, 4}));
  EXPECT_EQ(r->rounds[1].members.at(4), (std::set<CategoryId>{2, 3}));
  const SnippetSet& last = r->rounds[2].snippets;
  ASSERT_EQ(last.snippets.size(), 1u);
  EXPECT_EQ(last.snippets[0].end, m.size());
}

TEST(HierarchicalCluster, SingleCategoryHasNoRounds) {
  const Message m = ToBytes("abc");
  ResponsePool pool = HuePool();
  absl::StatusOr<SnippetSet> initial = InitialSnippets(m, {1, 1, 1});
  ASSERT_TRUE(initial.ok());
  absl::StatusOr<ClusteringResult> r = HierarchicalCluster(m, *initial, pool);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r->history.empty());
  EXPECT_EQ(r->rounds.size(), 1u);
}

TEST(HierarchicalCluster, NonResponsiveBytesClusterAtOrigin) {
  const Message m = ToBytes("abcd");
  ResponsePool pool = HuePool();
  absl::StatusOr<SnippetSet> initial =
      InitialSnippets(m, {kNonResponsive, 2, 2, 3});
  ASSERT_TRUE(initial.ok());
  absl::StatusOr<ClusteringResult> r = HierarchicalCluster(m, *initial, pool);
  ASSERT_TRUE(r.ok()) << r.status();
  // Silent bytes sit at the zero vector, 94-odd units from both replies.
  ASSERT_EQ(r->history.size(), 2u);
  EXPECT_EQ(r->history[0], (MergeEvent{1, 2, 3, 4, 0.0}));
  EXPECT_EQ(r->history[1].first, kNonResponsive);
  EXPECT_EQ(r->history[1].second, 4);
  EXPECT_NEAR(r->history[1].distance,
              std::sqrt(1.0 + 94.0 * 94 + 11 * 11 + 2 * 2 + 13 * 13), 1e-9);
}

TEST(HierarchicalCluster, UnknownCategoryIsAnError) {
  const Message m = ToBytes("ab");
  ResponsePool pool = HuePool();
  absl::StatusOr<SnippetSet> initial = InitialSnippets(m, {1, 9});
  ASSERT_TRUE(initial.ok());
  EXPECT_TRUE(IsError(HierarchicalCluster(m, *initial, pool).status(),
                      ErrorKind::kMissingCategory));
}

TEST(HierarchicalCluster, RoundsAreValidPartitionsAndCoarsen) {
  std::mt19937_64 rng(11);
  ResponsePool pool("s", 0);
  const Message probe = ToBytes("p");
  for (int c = 0; c < 6; ++c) {
    std::string reply(static_cast<size_t>(5 + 7 * c), 'a' + c);
    pool.Classify(R(reply), R(reply), probe);
  }
  for (int n = 0; n < 100; ++n) {
    Message m(1 + rng() % 30, 'x');
    std::vector<CategoryId> cats(m.size());
    for (CategoryId& c : cats) c = static_cast<CategoryId>(rng() % 7) - 1;
    absl::StatusOr<SnippetSet> initial = InitialSnippets(m, cats);
    ASSERT_TRUE(initial.ok());
    absl::StatusOr<ClusteringResult> r = HierarchicalCluster(m, *initial, pool);
    ASSERT_TRUE(r.ok());
    size_t previous = m.size() + 1;
    for (const ClusterRound& round : r->rounds) {
      ASSERT_TRUE(ValidatePartition(round.snippets, m.size()).ok());
      EXPECT_LE(round.snippets.snippets.size(), previous);
      previous = round.snippets.snippets.size();
    }
    EXPECT_EQ(r->rounds.back().snippets.snippets.size(), 1u);
  }
}

TEST(DedupSnippetSets, DropsRepeatedBoundaries) {
  const Message m = ToBytes("abcd");
  SnippetSet a = *ApplyPartition(m, {2}, {1, 2});
  SnippetSet b = *ApplyPartition(m, {2}, {7, 8}, 0, 1);
  SnippetSet c = *ApplyPartition(m, {}, {9}, 0, 2);
  std::vector<SnippetSet> out = DedupSnippetSets({a, b, c});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], a);
  EXPECT_EQ(out[1], c);
}

}  // namespace
}  // namespace snipfuzz
