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

#include <algorithm>
#include <atomic>
#include <numeric>

#include "spdlog/spdlog.h"

namespace snipfuzz {

namespace {

std::span<const uint8_t> Truncate(std::span<const uint8_t> s) {
  if (s.size() <= kMaxDistanceInput) return s;
  // Once at warn level; a campaign can produce thousands of these.
  static std::atomic<bool> warned{false};
  const auto level =
      warned.exchange(true) ? spdlog::level::debug : spdlog::level::warn;
  spdlog::log(level, "response of {} bytes truncated to {} for edit distance",
              s.size(), kMaxDistanceInput);
  return s.first(kMaxDistanceInput);
}

}  // namespace

size_t EditDistance(std::span<const uint8_t> a, std::span<const uint8_t> b) {
  if (a.size() < b.size()) std::swap(a, b);
  // b is the shorter input; rows have |b| + 1 entries.
  std::vector<size_t> previous(b.size() + 1), current(b.size() + 1);
  std::iota(previous.begin(), previous.end(), size_t{0});
  for (size_t i = 1; i <= a.size(); ++i) {
    current[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      size_t substitution = previous[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      current[j] = std::min({previous[j] + 1, current[j - 1] + 1, substitution});
    }
    std::swap(previous, current);
  }
  return previous[b.size()];
}

double SimilarityScore(std::span<const uint8_t> a, std::span<const uint8_t> b) {
  a = Truncate(a);
  b = Truncate(b);
  const size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(EditDistance(a, b)) /
                   static_cast<double>(longest);
}

namespace {

double ScoreFor(size_t distance, size_t longest) {
  return 1.0 - static_cast<double>(distance) / static_cast<double>(longest);
}

// Edit distance if it is at most `k`, otherwise k + 1. Only the diagonal band
// |i - j| <= k is filled, so near-identical responses cost O(n * k).
size_t BoundedEditDistance(std::span<const uint8_t> a,
                           std::span<const uint8_t> b, size_t k) {
  if (a.size() < b.size()) std::swap(a, b);
  if (a.size() - b.size() > k) return k + 1;
  const size_t cap = k + 1;
  std::vector<size_t> previous(b.size() + 1, cap), current(b.size() + 1, cap);
  for (size_t j = 0; j <= std::min(b.size(), k); ++j) previous[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    const size_t lo = i > k ? i - k : 0;
    const size_t hi = std::min(b.size(), i + k);
    std::fill(current.begin(), current.end(), cap);
    if (lo == 0) current[0] = std::min(i, cap);
    size_t best = current[0];
    for (size_t j = std::max<size_t>(lo, 1); j <= hi; ++j) {
      size_t substitution = previous[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      current[j] = std::min(
          {previous[j] + 1, current[j - 1] + 1, substitution, cap});
      best = std::min(best, current[j]);
    }
    if (best >= cap) return cap;
    std::swap(previous, current);
  }
  return previous[b.size()];
}

}  // namespace

bool SimilarityAtLeast(std::span<const uint8_t> a, std::span<const uint8_t> b,
                       double threshold) {
  a = Truncate(a);
  b = Truncate(b);
  const size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0 >= threshold;
  if (ScoreFor(0, longest) < threshold) return false;
  // Largest distance whose score still reaches the threshold, found with the
  // same arithmetic SimilarityScore uses.
  size_t k = static_cast<size_t>(
      std::max(0.0, (1.0 - threshold) * static_cast<double>(longest)));
  k = std::min(k, longest);
  while (k > 0 && ScoreFor(k, longest) < threshold) --k;
  while (k < longest && ScoreFor(k + 1, longest) >= threshold) ++k;
  return BoundedEditDistance(a, b, k) <= k;
}

bool SameCategory(const Response& r_i, double s_ii, const Response& r_j,
                  double s_jj) {
  return SimilarityAtLeast(r_i.bytes, r_j.bytes, std::min(s_ii, s_jj));
}

const ResponseCategory* ResponsePool::Find(CategoryId id) const {
  if (id < 0 || static_cast<size_t>(id) >= categories_.size()) return nullptr;
  return &categories_[id];
}

Classification ResponsePool::Classify(const Response& r,
                                      const Response& r_repeat,
                                      const Message& probe) {
  const double self = SelfSimilarity(r, r_repeat);
  for (const ResponseCategory& c : categories_) {
    if (SameCategory(r, self, c.representative, c.self_similarity)) {
      return Classification::Existing(c.id);
    }
  }
  const CategoryId id = static_cast<CategoryId>(categories_.size());
  categories_.push_back({id, r, probe, self});
  return Classification::New(id);
}

std::optional<CategoryId> ResponsePool::MatchKnown(const Response& r) const {
  for (const ResponseCategory& c : categories_) {
    if (SimilarityAtLeast(r.bytes, c.representative.bytes, c.self_similarity)) {
      return c.id;
    }
  }
  return std::nullopt;
}

}  // namespace snipfuzz
