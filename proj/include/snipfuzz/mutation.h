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

#ifndef SNIPFUZZ_MUTATION_H_
#define SNIPFUZZ_MUTATION_H_

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "snipfuzz/message.h"

namespace snipfuzz {

enum class ByteFlipMode {
  kComplement,  // every byte -> ~byte
  kHighBit,     // every byte -> byte ^ 0x80
};

struct MutationConfig {
  // Boundary values spliced (as ASCII decimals) into numeric snippets.
  std::vector<int64_t> boundaries{0,     -1,    255,        256,
                                  65535, 65536, 2147483647, 4294967296};
  std::vector<ByteArray> dictionary = DefaultDictionary();
  std::vector<int> repeat_counts{2, 4, 8, 16, 128};
  ByteFlipMode byte_flip = ByteFlipMode::kComplement;
  // Havoc plans tried per seed message before giving up.
  uint64_t havoc_budget = 10000;
  size_t max_message_length = kMaxMessageLength;

  static std::vector<ByteArray> DefaultDictionary();
  // Number of concrete schemes applied to each snippet by EnumeratePlans.
  size_t SchemesPerSnippet() const {
    return 2 + boundaries.size() + dictionary.size() + repeat_counts.size();
  }
};

struct MutationScheme {
  enum class Kind { kEmpty, kByteFlip, kDataBoundary, kDictionary, kRepeat };
  Kind kind = Kind::kEmpty;
  // Boundary index (kDataBoundary) or dictionary index (kDictionary).
  size_t index = 0;
  // kRepeat only.
  int count = 0;

  static MutationScheme Empty() { return {Kind::kEmpty, 0, 0}; }
  static MutationScheme ByteFlip() { return {Kind::kByteFlip, 0, 0}; }
  static MutationScheme DataBoundary(size_t i) {
    return {Kind::kDataBoundary, i, 0};
  }
  static MutationScheme Dictionary(size_t i) {
    return {Kind::kDictionary, i, 0};
  }
  static MutationScheme Repeat(int count) { return {Kind::kRepeat, 0, count}; }

  std::string Name() const;
  friend bool operator==(const MutationScheme&, const MutationScheme&) =
      default;
};

// Every concrete scheme the config defines, in enumeration order: Empty,
// ByteFlip, each boundary, each dictionary entry, each repeat count.
std::vector<MutationScheme> AllSchemes(const MutationConfig& config);

struct PlanTarget {
  size_t snippet_index = 0;
  MutationScheme scheme;
  friend bool operator==(const PlanTarget&, const PlanTarget&) = default;
};

// A replayable description of one mutated sequence: applying it to the same
// seed annotation always yields the same bytes.
struct MutationPlan {
  SeedId seed;
  size_t message_index = 0;
  // Round of the snippet set the targets index into.
  int round = 0;
  std::vector<PlanTarget> targets;
  bool havoc = false;
  uint64_t rng_seed = 0;

  friend bool operator==(const MutationPlan&, const MutationPlan&) = default;
};

// True when the snippet bytes are an optionally signed decimal integer.
bool IsDecimalInteger(const ByteArray& bytes);

// Applies one scheme to snippet `snippet` of `message`.
// Errors: InvalidSnippet (out of range), NotApplicable (DataBoundary on a
// non-numeric snippet), MutationOverflow (result exceeds the length cap).
absl::StatusOr<Message> ApplyScheme(const Message& message,
                                    const Snippet& snippet,
                                    const MutationScheme& scheme,
                                    const MutationConfig& config);

// Applies every target of `plan` to the seed's message. Targets are applied
// right to left so earlier offsets stay valid.
absl::StatusOr<MessageSequence> ApplyPlan(const Seed& seed,
                                          const MutationPlan& plan,
                                          const MutationConfig& config);

// Deterministic plans for one message: sets in order, snippets left to right,
// schemes in AllSchemes order. Always SchemesPerSnippet() plans per snippet;
// inapplicable DataBoundary plans are rejected later by ApplyScheme.
std::vector<MutationPlan> EnumeratePlans(const Seed& seed, size_t message_index,
                                         const std::vector<SnippetSet>& sets,
                                         const MutationConfig& config);

struct BudgetExhausted {
  uint64_t emitted = 0;
};

// Random multi-snippet plans for one message. Each plan draws its own 64-bit
// seed from the stream generator; the plan's choices are derived from that
// seed alone.
class HavocStream {
 public:
  HavocStream(const Seed& seed, size_t message_index,
              std::vector<SnippetSet> sets, const MutationConfig& config,
              std::mt19937_64& rng);

  std::variant<MutationPlan, BudgetExhausted> Next();
  uint64_t emitted() const { return emitted_; }

  // Derives a plan from a plan seed; exposed for replay and tests.
  // DataBoundary is only drawn for snippets holding a decimal integer.
  static MutationPlan PlanFromSeed(const Seed& seed, size_t message_index,
                                   const std::vector<SnippetSet>& sets,
                                   const std::vector<MutationScheme>& schemes,
                                   uint64_t plan_seed);

 private:
  Seed seed_;
  size_t message_index_;
  std::vector<SnippetSet> sets_;
  std::vector<MutationScheme> schemes_;
  uint64_t budget_;
  uint64_t emitted_ = 0;
  std::mt19937_64& rng_;
};

// Byte-level operations of the byte-blind baseline.
enum class ByteOp { kOverwrite, kDelete, kDuplicate };

// Applies `op` to [offset, offset+length). Overwrite copies `fill` (which must
// hold `length` bytes) over the range.
Message ApplyByteOp(const Message& m, ByteOp op, size_t offset, size_t length,
                    const ByteArray& fill = {});

// Byte-blind mutation: a random range of 1..4 bytes is overwritten with
// random bytes, deleted, or duplicated. An empty input gets one random byte.
Message NoSnippetMutate(const Message& m, std::mt19937_64& rng);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_MUTATION_H_
