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

#include "snipfuzz/message.h"

#include <set>

#include "absl/strings/str_cat.h"
#include "snipfuzz/errors.h"

namespace snipfuzz {

std::vector<size_t> SnippetSet::Boundaries() const {
  std::vector<size_t> out;
  for (size_t i = 1; i < snippets.size(); ++i) out.push_back(snippets[i].start);
  return out;
}

std::vector<CategoryId> SnippetSet::Categories() const {
  std::vector<CategoryId> out;
  out.reserve(snippets.size());
  for (const Snippet& s : snippets) out.push_back(s.category);
  return out;
}

absl::Status ValidatePartition(const SnippetSet& set, size_t message_length) {
  if (message_length == 0) {
    if (!set.snippets.empty()) {
      return MakeError(ErrorKind::kInvalidPartition,
                       "empty message cannot hold snippets");
    }
    return absl::OkStatus();
  }
  if (set.snippets.empty()) {
    return MakeError(ErrorKind::kInvalidPartition, "no snippets for a ",
                     message_length, "-byte message");
  }
  size_t expected_start = 0;
  for (size_t i = 0; i < set.snippets.size(); ++i) {
    const Snippet& s = set.snippets[i];
    if (s.start != expected_start) {
      return MakeError(ErrorKind::kInvalidPartition, "snippet ", i,
                       " starts at ", s.start, ", expected ", expected_start);
    }
    if (s.end <= s.start) {
      return MakeError(ErrorKind::kInvalidPartition, "snippet ", i,
                       " is empty or reversed [", s.start, ",", s.end, ")");
    }
    if (s.end > message_length) {
      return MakeError(ErrorKind::kInvalidPartition, "snippet ", i,
                       " ends at ", s.end, " past message length ",
                       message_length);
    }
    expected_start = s.end;
  }
  if (expected_start != message_length) {
    return MakeError(ErrorKind::kInvalidPartition, "snippets cover [0,",
                     expected_start, ") of ", message_length, " bytes");
  }
  return absl::OkStatus();
}

absl::StatusOr<SnippetSet> ApplyPartition(
    const Message& message, const std::vector<size_t>& boundaries,
    const std::vector<CategoryId>& categories, size_t message_index,
    int round) {
  const size_t length = message.size();
  std::vector<size_t> cuts = boundaries;
  if (!cuts.empty() && cuts.back() == length) cuts.pop_back();
  size_t previous = 0;
  for (size_t i = 0; i < cuts.size(); ++i) {
    if (cuts[i] <= previous || cuts[i] >= length) {
      return MakeError(ErrorKind::kInvalidPartition, "boundary ", i, " (",
                       cuts[i], ") is not strictly increasing within (0,",
                       length, ")");
    }
    previous = cuts[i];
  }
  if (categories.size() != cuts.size() + 1) {
    return MakeError(ErrorKind::kInvalidPartition, "expected ",
                     cuts.size() + 1, " categories, got ", categories.size());
  }
  if (length == 0) {
    return MakeError(ErrorKind::kInvalidPartition,
                     "cannot partition an empty message");
  }
  SnippetSet set;
  set.message_index = message_index;
  set.round = round;
  size_t start = 0;
  for (size_t i = 0; i <= cuts.size(); ++i) {
    size_t end = i < cuts.size() ? cuts[i] : length;
    set.snippets.push_back({start, end, categories[i]});
    start = end;
  }
  if (absl::Status st = ValidatePartition(set, length); !st.ok()) return st;
  return set;
}

const Seed* SeedCorpus::Find(const SeedId& id) const {
  for (const Seed& s : seeds) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

Seed* SeedCorpus::Find(const SeedId& id) {
  for (Seed& s : seeds) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

absl::Status ValidateCorpus(const SeedCorpus& corpus) {
  std::set<SeedId> ids;
  bool has_initial = false;
  for (size_t i = 0; i < corpus.seeds.size(); ++i) {
    const Seed& seed = corpus.seeds[i];
    if (seed.id.empty()) {
      return MakeError(ErrorKind::kMalformedCorpus, "seeds[", i,
                       "].id: empty identifier");
    }
    if (!ids.insert(seed.id).second) {
      return MakeError(ErrorKind::kMalformedCorpus, "seeds[", i,
                       "].id: duplicate id \"", seed.id, "\"");
    }
    if (seed.sequence.empty()) {
      return MakeError(ErrorKind::kMalformedCorpus, "seeds[", i,
                       "].messages: empty message sequence");
    }
    for (size_t m = 0; m < seed.sequence.size(); ++m) {
      if (seed.sequence[m].size() > kMaxMessageLength) {
        return MakeError(ErrorKind::kMalformedCorpus, "seeds[", i,
                         "].messages[", m, "]: ", seed.sequence[m].size(),
                         " bytes exceeds the ", kMaxMessageLength,
                         "-byte limit");
      }
    }
    if (seed.origin.kind == SeedOrigin::Kind::kInitial) {
      has_initial = true;
    } else if (!ids.contains(seed.origin.parent)) {
      return MakeError(ErrorKind::kMalformedCorpus, "seeds[", i,
                       "].origin: parent \"", seed.origin.parent,
                       "\" does not precede it in the corpus");
    }
  }
  if (!has_initial) {
    return MakeError(ErrorKind::kMalformedCorpus,
                     "seeds: corpus needs at least one initial seed");
  }
  for (size_t m = 0; m < corpus.restoring_sequence.size(); ++m) {
    if (corpus.restoring_sequence[m].size() > kMaxMessageLength) {
      return MakeError(ErrorKind::kMalformedCorpus, "restoring[", m,
                       "]: exceeds the ", kMaxMessageLength, "-byte limit");
    }
  }
  return absl::OkStatus();
}

}  // namespace snipfuzz
