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

#ifndef SNIPFUZZ_SNIPPET_INFERENCE_H_
#define SNIPFUZZ_SNIPPET_INFERENCE_H_

#include <array>
#include <cstddef>
#include <map>
#include <set>
#include <vector>

#include "absl/status/statusor.h"
#include "snipfuzz/message.h"
#include "snipfuzz/similarity.h"

namespace snipfuzz {

struct Probe {
  // 1-based position of the deleted byte.
  size_t index = 0;
  Message message;
};

// One probe per byte of `base`; probe i is `base` with byte i deleted.
struct ProbeSet {
  Message base;
  std::vector<Probe> probes;
};

absl::StatusOr<ProbeSet> GenerateProbes(const Message& message);

// Response features used for clustering. Segments are maximal runs of one
// byte class: ASCII letters, ASCII digits, or symbols. ASCII whitespace
// separates runs but is not counted as a segment of any class.
struct FeatureVector {
  double self_similarity = 0.0;
  size_t length = 0;
  size_t alpha_segments = 0;
  size_t numeric_segments = 0;
  size_t symbol_segments = 0;

  std::array<double, 5> AsArray() const {
    return {self_similarity, static_cast<double>(length),
            static_cast<double>(alpha_segments),
            static_cast<double>(numeric_segments),
            static_cast<double>(symbol_segments)};
  }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector VectorizeResponse(const ByteArray& response,
                                double self_similarity);

// Merges maximal runs of equal byte category into snippets (round 0).
absl::StatusOr<SnippetSet> InitialSnippets(
    const Message& message, const std::vector<CategoryId>& byte_categories,
    size_t message_index = 0);

struct MergeEvent {
  int round = 0;
  // Cluster ids; `first` < `second`. The merged cluster gets `merged`.
  int first = 0;
  int second = 0;
  int merged = 0;
  double distance = 0.0;
  friend bool operator==(const MergeEvent&, const MergeEvent&) = default;
};

struct Cluster {
  int id = 0;
  std::set<CategoryId> members;
  std::array<double, 5> center{};
};

struct ClusterRound {
  // Snippets are labeled with cluster ids (round 0: category ids).
  SnippetSet snippets;
  // Cluster id -> member categories, for the clusters alive in this round.
  std::map<int, std::set<CategoryId>> members;
};

struct ClusteringResult {
  std::vector<ClusterRound> rounds;
  std::vector<MergeEvent> history;

  std::vector<SnippetSet> SnippetSets() const;
};

// Agglomerative clustering of the response categories referenced by
// `initial`. Each round merges the two clusters whose centers are closest in
// raw Euclidean distance (ties: lowest (first, second) id pair), replaces
// them with a cluster centered at the unweighted mean of the two centers and
// emits a regenerated partition. Stops when one cluster is left.
//
// kNonResponsive bytes form their own cluster at the zero vector.
absl::StatusOr<ClusteringResult> HierarchicalCluster(const Message& message,
                                                     const SnippetSet& initial,
                                                     const ResponsePool& pool);

// Drops sets whose boundaries repeat an earlier set's. Order is preserved.
std::vector<SnippetSet> DedupSnippetSets(const std::vector<SnippetSet>& sets);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_SNIPPET_INFERENCE_H_
