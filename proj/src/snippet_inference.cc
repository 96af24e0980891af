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

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "snipfuzz/errors.h"

namespace snipfuzz {

namespace {

enum class ByteClass { kAlpha, kDigit, kSpace, kSymbol };

ByteClass Classify(uint8_t b) {
  if ((b >= 'a' && b <= 'z') || (b >= 'A' && b <= 'Z')) return ByteClass::kAlpha;
  if (b >= '0' && b <= '9') return ByteClass::kDigit;
  if (b == ' ' || b == '\t' || b == '\n' || b == '\r' || b == '\v' || b == '\f')
    return ByteClass::kSpace;
  return ByteClass::kSymbol;
}

double Distance(const std::array<double, 5>& a, const std::array<double, 5>& b) {
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(sum);
}

SnippetSet Regenerate(const SnippetSet& initial,
                      const std::map<CategoryId, int>& cluster_of, int round) {
  SnippetSet out;
  out.message_index = initial.message_index;
  out.round = round;
  for (const Snippet& s : initial.snippets) {
    const int label = cluster_of.at(s.category);
    if (!out.snippets.empty() && out.snippets.back().category == label) {
      out.snippets.back().end = s.end;
    } else {
      out.snippets.push_back({s.start, s.end, label});
    }
  }
  return out;
}

}  // namespace

absl::StatusOr<ProbeSet> GenerateProbes(const Message& message) {
  if (message.empty()) {
    return MakeError(ErrorKind::kEmptyMessage, "cannot probe an empty message");
  }
  ProbeSet set;
  set.base = message;
  set.probes.reserve(message.size());
  for (size_t i = 0; i < message.size(); ++i) {
    Message probe;
    probe.reserve(message.size() - 1);
    probe.insert(probe.end(), message.begin(), message.begin() + i);
    probe.insert(probe.end(), message.begin() + i + 1, message.end());
    set.probes.push_back({i + 1, std::move(probe)});
  }
  return set;
}

FeatureVector VectorizeResponse(const ByteArray& response,
                                double self_similarity) {
  FeatureVector v;
  v.self_similarity = self_similarity;
  v.length = response.size();
  std::optional<ByteClass> previous;
  for (uint8_t b : response) {
    const ByteClass c = Classify(b);
    if (c != previous) {
      switch (c) {
        case ByteClass::kAlpha: ++v.alpha_segments; break;
        case ByteClass::kDigit: ++v.numeric_segments; break;
        case ByteClass::kSymbol: ++v.symbol_segments; break;
        case ByteClass::kSpace: break;
      }
    }
    previous = c;
  }
  return v;
}

absl::StatusOr<SnippetSet> InitialSnippets(
    const Message& message, const std::vector<CategoryId>& byte_categories,
    size_t message_index) {
  if (byte_categories.size() != message.size()) {
    return MakeError(ErrorKind::kLengthMismatch, byte_categories.size(),
                     " byte categories for a ", message.size(),
                     "-byte message");
  }
  if (message.empty()) {
    return MakeError(ErrorKind::kEmptyMessage,
                     "cannot partition an empty message");
  }
  SnippetSet set;
  set.message_index = message_index;
  set.round = 0;
  for (size_t i = 0; i < message.size(); ++i) {
    if (!set.snippets.empty() &&
        set.snippets.back().category == byte_categories[i]) {
      set.snippets.back().end = i + 1;
    } else {
      set.snippets.push_back({i, i + 1, byte_categories[i]});
    }
  }
  return set;
}

std::vector<SnippetSet> ClusteringResult::SnippetSets() const {
  std::vector<SnippetSet> out;
  out.reserve(rounds.size());
  for (const ClusterRound& r : rounds) out.push_back(r.snippets);
  return out;
}

absl::StatusOr<ClusteringResult> HierarchicalCluster(const Message& message,
                                                     const SnippetSet& initial,
                                                     const ResponsePool& pool) {
  if (absl::Status st = ValidatePartition(initial, message.size()); !st.ok()) {
    return st;
  }
  // One cluster per category referenced by the initial partition.
  std::vector<Cluster> clusters;
  std::map<CategoryId, int> cluster_of;
  for (const Snippet& s : initial.snippets) {
    if (cluster_of.contains(s.category)) continue;
    Cluster c;
    c.id = s.category;
    c.members = {s.category};
    if (s.category != kNonResponsive) {
      const ResponseCategory* rc = pool.Find(s.category);
      if (rc == nullptr) {
        return MakeError(ErrorKind::kMissingCategory, "category ", s.category,
                         " is not in the response pool");
      }
      c.center =
          VectorizeResponse(rc->representative.bytes, rc->self_similarity)
              .AsArray();
    }
    cluster_of[s.category] = c.id;
    clusters.push_back(std::move(c));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.id < b.id; });

  ClusteringResult result;
  auto snapshot = [&](SnippetSet set) {
    ClusterRound round{std::move(set), {}};
    for (const Cluster& c : clusters) round.members[c.id] = c.members;
    result.rounds.push_back(std::move(round));
  };
  snapshot(initial);

  int next_id = clusters.back().id + 1;
  if (const int n = static_cast<int>(pool.size()); next_id < n) next_id = n;
  int round = 0;
  while (clusters.size() > 1) {
    ++round;
    size_t best_a = 0, best_b = 1;
    double best = std::numeric_limits<double>::infinity();
    // Clusters are kept sorted by id, so scanning a < b in order and keeping
    // strict improvements yields the lexicographically smallest tied pair.
    for (size_t a = 0; a < clusters.size(); ++a) {
      for (size_t b = a + 1; b < clusters.size(); ++b) {
        const double d = Distance(clusters[a].center, clusters[b].center);
        if (d < best) {
          best = d;
          best_a = a;
          best_b = b;
        }
      }
    }
    Cluster merged;
    merged.id = next_id++;
    merged.members = clusters[best_a].members;
    merged.members.insert(clusters[best_b].members.begin(),
                          clusters[best_b].members.end());
    for (size_t k = 0; k < merged.center.size(); ++k) {
      merged.center[k] =
          (clusters[best_a].center[k] + clusters[best_b].center[k]) / 2.0;
    }
    result.history.push_back(
        {round, clusters[best_a].id, clusters[best_b].id, merged.id, best});
    for (CategoryId member : merged.members) cluster_of[member] = merged.id;
    clusters.erase(clusters.begin() + best_b);
    clusters.erase(clusters.begin() + best_a);
    clusters.push_back(std::move(merged));

    snapshot(Regenerate(initial, cluster_of, round));
  }
  return result;
}

std::vector<SnippetSet> DedupSnippetSets(const std::vector<SnippetSet>& sets) {
  std::vector<SnippetSet> out;
  std::set<std::vector<size_t>> seen;
  for (const SnippetSet& s : sets) {
    if (seen.insert(s.Boundaries()).second) out.push_back(s);
  }
  return out;
}

}  // namespace snipfuzz
