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

#ifndef SNIPFUZZ_SIMILARITY_H_
#define SNIPFUZZ_SIMILARITY_H_

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "snipfuzz/message.h"

namespace snipfuzz {

// Bytes the device returned. An empty payload is a real answer; a timeout is
// not a Response and never reaches this module.
struct Response {
  ByteArray bytes;
  std::chrono::steady_clock::time_point received_at{};
};

// Responses longer than this are truncated before distance computation.
inline constexpr size_t kMaxDistanceInput = 8192;

// Unit-cost Levenshtein distance, two-row DP over the shorter input.
size_t EditDistance(std::span<const uint8_t> a, std::span<const uint8_t> b);

// 1 - distance / max(len). Two empty strings are identical (1.0).
double SimilarityScore(std::span<const uint8_t> a, std::span<const uint8_t> b);
inline double SimilarityScore(const Response& a, const Response& b) {
  return SimilarityScore(a.bytes, b.bytes);
}

// Same as SimilarityScore(a, b) >= threshold, without computing distances
// beyond what the threshold allows.
bool SimilarityAtLeast(std::span<const uint8_t> a, std::span<const uint8_t> b,
                       double threshold);

// Similarity of two answers to the same probe. Below 1 when the device
// embeds timestamps, tokens or other randomness in its replies.
inline double SelfSimilarity(const Response& r, const Response& r_repeat) {
  return SimilarityScore(r, r_repeat);
}

// r_i and r_j share a category when their similarity reaches either
// self-similarity threshold.
bool SameCategory(const Response& r_i, double s_ii, const Response& r_j,
                  double s_jj);

struct ResponseCategory {
  CategoryId id = 0;
  Response representative;
  Message probe;
  double self_similarity = 1.0;
};

struct Classification {
  enum class Kind { kExisting, kNew };
  Kind kind = Kind::kExisting;
  CategoryId category = 0;

  bool is_new() const { return kind == Kind::kNew; }
  static Classification Existing(CategoryId id) { return {Kind::kExisting, id}; }
  static Classification New(CategoryId id) { return {Kind::kNew, id}; }
  friend bool operator==(const Classification&, const Classification&) =
      default;
};

// Known response categories for one message of one seed. Category ids are
// dense, assigned in discovery order, and never change.
class ResponsePool {
 public:
  ResponsePool() = default;
  ResponsePool(SeedId seed, size_t message_index)
      : seed_(std::move(seed)), message_index_(message_index) {}

  const SeedId& seed() const { return seed_; }
  size_t message_index() const { return message_index_; }
  const std::vector<ResponseCategory>& categories() const {
    return categories_;
  }
  size_t size() const { return categories_.size(); }
  const ResponseCategory* Find(CategoryId id) const;

  // Full classification: first category (ascending id) that passes
  // SameCategory wins; otherwise `r` becomes the representative of a new
  // category whose self-similarity is measured against `r_repeat`.
  Classification Classify(const Response& r, const Response& r_repeat,
                          const Message& probe);

  // Lookup that only uses the representatives' thresholds, for callers that
  // have not measured the incoming response's self-similarity yet.
  std::optional<CategoryId> MatchKnown(const Response& r) const;

 private:
  SeedId seed_;
  size_t message_index_ = 0;
  std::vector<ResponseCategory> categories_;
};

}  // namespace snipfuzz

#endif  // SNIPFUZZ_SIMILARITY_H_
