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

#ifndef SNIPFUZZ_MESSAGE_H_
#define SNIPFUZZ_MESSAGE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace snipfuzz {

using ByteArray = std::vector<uint8_t>;

// A single request payload. Bytes are carried verbatim; nothing in the
// fuzzer ever re-encodes them.
using Message = ByteArray;

// Messages sent together, in order, as one request unit.
using MessageSequence = std::vector<Message>;

inline constexpr size_t kMaxMessageLength = 65535;

// Response category ids are dense per response pool. Bytes whose probe never
// got an answer are labeled with kNonResponsive.
using CategoryId = int;
inline constexpr CategoryId kNonResponsive = -1;

using SeedId = std::string;

inline ByteArray ToBytes(std::string_view s) {
  return ByteArray(s.begin(), s.end());
}
inline std::string ToString(const ByteArray& b) {
  return std::string(b.begin(), b.end());
}

// Half-open byte range [start, end) of one message with a category label.
struct Snippet {
  size_t start = 0;
  size_t end = 0;
  CategoryId category = 0;

  size_t size() const { return end - start; }
  friend bool operator==(const Snippet&, const Snippet&) = default;
};

// A partition of one message into snippets. `round` is the clustering round
// that produced it; 0 is the initial (probe-derived) partition.
struct SnippetSet {
  size_t message_index = 0;
  std::vector<Snippet> snippets;
  int round = 0;

  // Offsets where a snippet starts, excluding 0.
  std::vector<size_t> Boundaries() const;
  std::vector<CategoryId> Categories() const;

  friend bool operator==(const SnippetSet&, const SnippetSet&) = default;
};

// Shared validator: snippets must be sorted, non-empty, non-overlapping and
// cover [0, message_length) exactly.
absl::Status ValidatePartition(const SnippetSet& set, size_t message_length);

// Builds a partition from interior boundaries. `boundaries` are strictly
// increasing offsets in (0, length]; a trailing boundary equal to `length` is
// tolerated. There must be one category per resulting segment.
absl::StatusOr<SnippetSet> ApplyPartition(
    const Message& message, const std::vector<size_t>& boundaries,
    const std::vector<CategoryId>& categories, size_t message_index = 0,
    int round = 0);

struct SeedOrigin {
  enum class Kind { kInitial, kNewCategory };
  Kind kind = Kind::kInitial;
  // Only meaningful for kNewCategory.
  SeedId parent;
  size_t message_index = 0;
  CategoryId category = 0;

  static SeedOrigin Initial() { return {}; }
  static SeedOrigin NewCategory(SeedId parent, size_t message_index,
                                CategoryId category) {
    return {Kind::kNewCategory, std::move(parent), message_index, category};
  }
  friend bool operator==(const SeedOrigin&, const SeedOrigin&) = default;
};

struct Seed {
  SeedId id;
  MessageSequence sequence;
  SeedOrigin origin;
  // Message index -> snippet sets (initial first, then clustering rounds).
  std::map<size_t, std::vector<SnippetSet>> snippet_annotations;
};

struct SeedCorpus {
  std::vector<Seed> seeds;
  MessageSequence restoring_sequence;
  std::optional<std::string> restart_command;

  const Seed* Find(const SeedId& id) const;
  Seed* Find(const SeedId& id);
};

// Checks every SeedCorpus invariant: at least one initial seed, unique ids,
// non-empty sequences, bounded message length, and origins naming existing
// parents.
absl::Status ValidateCorpus(const SeedCorpus& corpus);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_MESSAGE_H_
