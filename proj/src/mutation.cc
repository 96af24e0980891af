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

#include "snipfuzz/mutation.h"

#include <algorithm>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/hex.h"

namespace snipfuzz {

namespace {

// Uniform draw in [0, n). The modulo bias is negligible for 64-bit draws and
// keeps streams identical across standard library implementations.
uint64_t Below(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

const SnippetSet* FindRound(const std::vector<SnippetSet>& sets, int round) {
  for (const SnippetSet& s : sets) {
    if (s.round == round) return &s;
  }
  return nullptr;
}

}  // namespace

std::vector<ByteArray> MutationConfig::DefaultDictionary() {
  return {ToBytes("true"), ToBytes("false"),         ToBytes("null"),
          ToBytes("0"),    ToBytes(""),              ByteArray(64, 'A'),
          ToBytes("%s%n%x")};
}

std::string MutationScheme::Name() const {
  switch (kind) {
    case Kind::kEmpty: return "empty";
    case Kind::kByteFlip: return "byte_flip";
    case Kind::kDataBoundary: return absl::StrCat("data_boundary[", index, "]");
    case Kind::kDictionary: return absl::StrCat("dictionary[", index, "]");
    case Kind::kRepeat: return absl::StrCat("repeat(", count, ")");
  }
  return "unknown";
}

std::vector<MutationScheme> AllSchemes(const MutationConfig& config) {
  std::vector<MutationScheme> out;
  out.reserve(config.SchemesPerSnippet());
  out.push_back(MutationScheme::Empty());
  out.push_back(MutationScheme::ByteFlip());
  for (size_t i = 0; i < config.boundaries.size(); ++i) {
    out.push_back(MutationScheme::DataBoundary(i));
  }
  for (size_t i = 0; i < config.dictionary.size(); ++i) {
    out.push_back(MutationScheme::Dictionary(i));
  }
  for (int count : config.repeat_counts) {
    out.push_back(MutationScheme::Repeat(count));
  }
  return out;
}

bool IsDecimalInteger(const ByteArray& bytes) {
  size_t i = 0;
  if (i < bytes.size() && (bytes[i] == '-' || bytes[i] == '+')) ++i;
  if (i == bytes.size()) return false;
  for (; i < bytes.size(); ++i) {
    if (bytes[i] < '0' || bytes[i] > '9') return false;
  }
  return true;
}

absl::StatusOr<Message> ApplyScheme(const Message& message,
                                    const Snippet& snippet,
                                    const MutationScheme& scheme,
                                    const MutationConfig& config) {
  if (snippet.start >= snippet.end || snippet.end > message.size()) {
    return MakeError(ErrorKind::kInvalidSnippet, "[", snippet.start, ",",
                     snippet.end, ") is not a snippet of a ", message.size(),
                     "-byte message");
  }
  const auto first = message.begin() + snippet.start;
  const auto last = message.begin() + snippet.end;
  const ByteArray original(first, last);
  ByteArray replacement;
  switch (scheme.kind) {
    case MutationScheme::Kind::kEmpty:
      break;
    case MutationScheme::Kind::kByteFlip:
      replacement = original;
      for (uint8_t& b : replacement) {
        b = config.byte_flip == ByteFlipMode::kComplement
                ? static_cast<uint8_t>(~b)
                : static_cast<uint8_t>(b ^ 0x80);
      }
      break;
    case MutationScheme::Kind::kDataBoundary:
      if (scheme.index >= config.boundaries.size()) {
        return MakeError(ErrorKind::kInvalidSnippet, "boundary index ",
                         scheme.index, " out of range");
      }
      if (!IsDecimalInteger(original)) {
        return MakeError(ErrorKind::kNotApplicable, "snippet \"",
                         EscapeBytes(original), "\" is not a decimal integer");
      }
      replacement = ToBytes(absl::StrCat(config.boundaries[scheme.index]));
      break;
    case MutationScheme::Kind::kDictionary:
      if (scheme.index >= config.dictionary.size()) {
        return MakeError(ErrorKind::kInvalidSnippet, "dictionary index ",
                         scheme.index, " out of range");
      }
      replacement = config.dictionary[scheme.index];
      break;
    case MutationScheme::Kind::kRepeat: {
      if (scheme.count < 1) {
        return MakeError(ErrorKind::kInvalidSnippet, "repeat count ",
                         scheme.count, " must be positive");
      }
      const size_t grown = message.size() - original.size() +
                           original.size() * static_cast<size_t>(scheme.count);
      if (grown > config.max_message_length) {
        return MakeError(ErrorKind::kMutationOverflow, "repeat(", scheme.count,
                         ") would produce ", grown, " bytes");
      }
      replacement.reserve(original.size() * scheme.count);
      for (int i = 0; i < scheme.count; ++i) {
        replacement.insert(replacement.end(), original.begin(),
                           original.end());
      }
      break;
    }
  }
  const size_t result_size =
      message.size() - original.size() + replacement.size();
  if (result_size > config.max_message_length) {
    return MakeError(ErrorKind::kMutationOverflow, scheme.Name(),
                     " would produce ", result_size, " bytes");
  }
  Message out;
  out.reserve(result_size);
  out.insert(out.end(), message.begin(), first);
  out.insert(out.end(), replacement.begin(), replacement.end());
  out.insert(out.end(), last, message.end());
  return out;
}

absl::StatusOr<MessageSequence> ApplyPlan(const Seed& seed,
                                          const MutationPlan& plan,
                                          const MutationConfig& config) {
  if (plan.message_index >= seed.sequence.size()) {
    return MakeError(ErrorKind::kInvalidSnippet, "message index ",
                     plan.message_index, " out of range for seed ", seed.id);
  }
  auto it = seed.snippet_annotations.find(plan.message_index);
  if (it == seed.snippet_annotations.end()) {
    return MakeError(ErrorKind::kInvalidSnippet, "seed ", seed.id,
                     " has no annotation for message ", plan.message_index);
  }
  const SnippetSet* set = FindRound(it->second, plan.round);
  if (set == nullptr) {
    return MakeError(ErrorKind::kInvalidSnippet, "seed ", seed.id,
                     " has no snippet set for round ", plan.round);
  }
  std::vector<PlanTarget> targets = plan.targets;
  std::sort(targets.begin(), targets.end(),
            [](const PlanTarget& a, const PlanTarget& b) {
              return a.snippet_index > b.snippet_index;
            });
  Message message = seed.sequence[plan.message_index];
  for (const PlanTarget& t : targets) {
    if (t.snippet_index >= set->snippets.size()) {
      return MakeError(ErrorKind::kInvalidSnippet, "snippet index ",
                       t.snippet_index, " out of range");
    }
    absl::StatusOr<Message> next =
        ApplyScheme(message, set->snippets[t.snippet_index], t.scheme, config);
    if (!next.ok()) return next.status();
    message = *std::move(next);
  }
  MessageSequence out = seed.sequence;
  out[plan.message_index] = std::move(message);
  return out;
}

std::vector<MutationPlan> EnumeratePlans(const Seed& seed, size_t message_index,
                                         const std::vector<SnippetSet>& sets,
                                         const MutationConfig& config) {
  const std::vector<MutationScheme> schemes = AllSchemes(config);
  std::vector<MutationPlan> plans;
  for (const SnippetSet& set : sets) {
    for (size_t i = 0; i < set.snippets.size(); ++i) {
      for (const MutationScheme& scheme : schemes) {
        MutationPlan plan;
        plan.seed = seed.id;
        plan.message_index = message_index;
        plan.round = set.round;
        plan.targets = {{i, scheme}};
        plans.push_back(std::move(plan));
      }
    }
  }
  return plans;
}

HavocStream::HavocStream(const Seed& seed, size_t message_index,
                         std::vector<SnippetSet> sets,
                         const MutationConfig& config, std::mt19937_64& rng)
    : seed_(seed),
      message_index_(message_index),
      sets_(std::move(sets)),
      schemes_(AllSchemes(config)),
      budget_(config.havoc_budget),
      rng_(rng) {}

std::variant<MutationPlan, BudgetExhausted> HavocStream::Next() {
  if (emitted_ >= budget_ || sets_.empty() || schemes_.empty()) {
    return BudgetExhausted{emitted_};
  }
  ++emitted_;
  return PlanFromSeed(seed_, message_index_, sets_, schemes_, rng_());
}

MutationPlan HavocStream::PlanFromSeed(const Seed& seed, size_t message_index,
                                       const std::vector<SnippetSet>& sets,
                                       const std::vector<MutationScheme>& schemes,
                                       uint64_t plan_seed) {
  std::mt19937_64 rng(plan_seed);
  MutationPlan plan;
  plan.seed = seed.id;
  plan.message_index = message_index;
  plan.havoc = true;
  plan.rng_seed = plan_seed;

  const SnippetSet& set = sets[Below(rng, sets.size())];
  plan.round = set.round;
  const size_t n = set.snippets.size();
  const size_t k = 1 + Below(rng, std::min<size_t>(8, n));
  std::vector<size_t> indices(n);
  std::iota(indices.begin(), indices.end(), size_t{0});
  for (size_t i = 0; i < k; ++i) {
    std::swap(indices[i], indices[i + Below(rng, n - i)]);
  }
  const Message& message = seed.sequence[message_index];
  for (size_t i = 0; i < k; ++i) {
    const Snippet& snippet = set.snippets[indices[i]];
    const bool numeric = IsDecimalInteger(
        ByteArray(message.begin() + snippet.start, message.begin() + snippet.end));
    std::vector<const MutationScheme*> usable;
    for (const MutationScheme& s : schemes) {
      if (s.kind != MutationScheme::Kind::kDataBoundary || numeric) {
        usable.push_back(&s);
      }
    }
    plan.targets.push_back({indices[i], *usable[Below(rng, usable.size())]});
  }
  std::sort(plan.targets.begin(), plan.targets.end(),
            [](const PlanTarget& a, const PlanTarget& b) {
              return a.snippet_index < b.snippet_index;
            });
  return plan;
}

Message ApplyByteOp(const Message& m, ByteOp op, size_t offset, size_t length,
                    const ByteArray& fill) {
  offset = std::min(offset, m.size());
  length = std::min(length, m.size() - offset);
  Message out;
  switch (op) {
    case ByteOp::kOverwrite:
      out = m;
      for (size_t i = 0; i < length && i < fill.size(); ++i) {
        out[offset + i] = fill[i];
      }
      break;
    case ByteOp::kDelete:
      out.insert(out.end(), m.begin(), m.begin() + offset);
      out.insert(out.end(), m.begin() + offset + length, m.end());
      break;
    case ByteOp::kDuplicate:
      out.insert(out.end(), m.begin(), m.begin() + offset + length);
      out.insert(out.end(), m.begin() + offset, m.end());
      break;
  }
  return out;
}

Message NoSnippetMutate(const Message& m, std::mt19937_64& rng) {
  if (m.empty()) return Message{static_cast<uint8_t>(rng())};
  const size_t length = std::min<size_t>(1 + Below(rng, 4), m.size());
  const size_t offset = Below(rng, m.size() - length + 1);
  const auto op = static_cast<ByteOp>(Below(rng, 3));
  ByteArray fill;
  if (op == ByteOp::kOverwrite) {
    for (size_t i = 0; i < length; ++i) fill.push_back(static_cast<uint8_t>(rng()));
  }
  Message out = ApplyByteOp(m, op, offset, length, fill);
  if (out.size() > kMaxMessageLength) return m;
  return out;
}

}  // namespace snipfuzz
