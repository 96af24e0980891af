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

#include "snipfuzz/similarity.h"

#include <random>

#include "gtest/gtest.h"
#include "snipfuzz/message.h"

namespace snipfuzz {
namespace {

const char kR3[] =
    R"({"error":{"type":6,"address":"/lights/1/state/n","description":"parameter, n, not available"}})";
const char kR4[] =
    R"({"error":{"type":6,"address":"/lights/1/state/o","description":"parameter, o, not available"}})";

Response R(std::string_view s) { return Response{ToBytes(s), {}}; }

// Full-matrix Wagner-Fischer, written independently of the two-row version.
size_t MatrixDistance(const ByteArray& a, const ByteArray& b) {
  std::vector<std::vector<size_t>> d(a.size() + 1,
                                     std::vector<size_t>(b.size() + 1));
  for (size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] != b[j - 1])});
    }
  }
  return d[a.size()][b.size()];
}

TEST(EditDistance, KnownPairs) {
  EXPECT_EQ(EditDistance(ToBytes("kitten"), ToBytes("sitting")), 3u);
  EXPECT_EQ(EditDistance(ToBytes(""), ToBytes("abc")), 3u);
  EXPECT_EQ(EditDistance(ToBytes("abc"), ToBytes("abc")), 0u);
  EXPECT_EQ(EditDistance(ToBytes(kR3), ToBytes(kR4)), 2u);
}

TEST(EditDistance, MatchesMatrixOnRandomInputs) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 300; ++n) {
    ByteArray a(rng() % 40), b(rng() % 40);
    for (uint8_t& c : a) c = static_cast<uint8_t>('a' + rng() % 4);
    for (uint8_t& c : b) c = static_cast<uint8_t>('a' + rng() % 4);
    ASSERT_EQ(EditDistance(a, b), MatrixDistance(a, b));
    ASSERT_EQ(EditDistance(a, b), EditDistance(b, a));
  }
}

TEST(SimilarityScore, UnknownParameterReplies) {
  EXPECT_NEAR(SimilarityScore(ToBytes(kR3), ToBytes(kR4)), 0.979, 0.001);
  EXPECT_DOUBLE_EQ(SimilarityScore(ToBytes(""), ToBytes("")), 1.0);
  EXPECT_DOUBLE_EQ(SimilarityScore(ToBytes("ab"), ToBytes("")), 0.0);
}

TEST(SimilarityScore, BoundedAndSymmetric) {
  std::mt19937_64 rng(4);
  for (int n = 0; n < 200; ++n) {
    ByteArray a(rng() % 20), b(rng() % 20);
    for (uint8_t& c : a) c = static_cast<uint8_t>(rng() % 3);
    for (uint8_t& c : b) c = static_cast<uint8_t>(rng() % 3);
    const double s = SimilarityScore(a, b);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
    EXPECT_DOUBLE_EQ(s, SimilarityScore(b, a));
  }
}

TEST(SimilarityAtLeast, AgreesWithFullScore) {
  std::mt19937_64 rng(5);
  const double thresholds[] = {0.0, 0.5, 0.8, 0.9, 0.95, 0.979, 1.0};
  for (int n = 0; n < 2000; ++n) {
    ByteArray a(rng() % 60), b;
    for (uint8_t& c : a) c = static_cast<uint8_t>('a' + rng() % 3);
    b = a;
    // Near-identical pairs exercise the band edges.
    for (int k = static_cast<int>(rng() % 6); k > 0 && !b.empty(); --k) {
      b[rng() % b.size()] = static_cast<uint8_t>('a' + rng() % 3);
      if (rng() % 3 == 0) b.erase(b.begin() + rng() % b.size());
      if (rng() % 3 == 0) b.push_back('c');
    }
    for (double t : thresholds) {
      ASSERT_EQ(SimilarityAtLeast(a, b, t), SimilarityScore(a, b) >= t)
          << ToString(a) << " / " << ToString(b) << " @ " << t;
    }
  }
}

TEST(SameCategory, EitherThresholdSuffices) {
  EXPECT_FALSE(SameCategory(R(kR3), 1.0, R(kR4), 1.0));
  EXPECT_TRUE(SameCategory(R(kR3), 0.97, R(kR4), 1.0));
  EXPECT_TRUE(SameCategory(R(kR3), 1.0, R(kR4), 0.97));
  EXPECT_TRUE(SameCategory(R("x"), 1.0, R("x"), 1.0));
}

TEST(ResponsePool, DenseIdsInDiscoveryOrder) {
  ResponsePool pool("s0", 0);
  const Message probe = ToBytes("p");
  EXPECT_EQ(pool.Classify(R("a"), R("a"), probe), Classification::New(0));
  EXPECT_EQ(pool.Classify(R(kR3), R(kR3), probe), Classification::New(1));
  EXPECT_EQ(pool.Classify(R(kR4), R(kR4), probe), Classification::New(2));
  EXPECT_EQ(pool.Classify(R(kR3), R(kR3), probe), Classification::Existing(1));
  EXPECT_EQ(pool.size(), 3u);
  EXPECT_EQ(pool.MatchKnown(R(kR4)), std::optional<CategoryId>(2));
  EXPECT_EQ(pool.MatchKnown(R("zz")), std::nullopt);
}

TEST(ResponsePool, RandomizedRepliesShareACategory) {
  ResponsePool pool;
  const Message probe = ToBytes("p");
  // Self-similarity below 1 widens the category.
  pool.Classify(R("time=0001 ok"), R("time=0002 ok"), probe);
  EXPECT_EQ(pool.Classify(R("time=0003 ok"), R("time=0003 ok"), probe),
            Classification::Existing(0));
  EXPECT_EQ(pool.MatchKnown(R("time=0004 ok")), std::optional<CategoryId>(0));
  EXPECT_EQ(pool.MatchKnown(R("fail")), std::nullopt);
}

}  // namespace
}  // namespace snipfuzz
