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

#include "snipfuzz/segmentation.h"

#include <algorithm>
#include <map>
#include <set>
#include <string>

#include "json.hpp"
#include "snipfuzz/errors.h"

namespace snipfuzz {

using Json = nlohmann::ordered_json;

absl::StatusOr<double> SegmentationSimilarity(const ByteLabels& inferred,
                                              const ByteLabels& truth) {
  if (inferred.size() != truth.size()) {
    return MakeError(ErrorKind::kLengthMismatch, "inferred labels cover ",
                     inferred.size(), " bytes, ground truth ", truth.size());
  }
  if (inferred.empty()) return 1.0;
  size_t wrong = 0;
  for (size_t i = 0; i < inferred.size(); ++i) {
    if ((inferred[i] != 0) != (truth[i] != 0)) ++wrong;
  }
  return 1.0 - static_cast<double>(wrong) / static_cast<double>(inferred.size());
}

CategoryId DominantCategory(const std::vector<CategoryId>& byte_categories) {
  std::map<CategoryId, size_t> count;
  for (CategoryId c : byte_categories) {
    if (c != kNonResponsive) ++count[c];
  }
  CategoryId best = kNonResponsive;
  size_t best_count = 0;
  for (const auto& [c, n] : count) {
    if (n > best_count) {
      best = c;
      best_count = n;
    }
  }
  return best;
}

std::vector<bool> DataFlags(const ClusterRound& round,
                            CategoryId format_category) {
  std::vector<bool> flags;
  for (const Snippet& s : round.snippets.snippets) {
    auto it = round.members.find(s.category);
    std::set<CategoryId> members =
        it != round.members.end() ? it->second : std::set<CategoryId>{s.category};
    const bool silent_only =
        members.size() == 1 && *members.begin() == kNonResponsive;
    flags.push_back(!silent_only && !members.contains(format_category));
  }
  return flags;
}

ByteLabels Annotation::Labels() const {
  ByteLabels out(length, 0);
  size_t start = 0;
  for (size_t k = 0; k < data.size(); ++k) {
    const size_t end = k < boundaries.size() ? boundaries[k] : length;
    for (size_t i = start; i < end && i < length; ++i) out[i] = data[k] ? 1 : 0;
    start = end;
  }
  return out;
}

std::vector<Annotation> AnnotateRounds(
    const SeedId& seed, size_t message_index, size_t length,
    const std::vector<CategoryId>& byte_categories,
    const ClusteringResult& clustering) {
  const CategoryId format = DominantCategory(byte_categories);
  std::vector<Annotation> out;
  std::set<std::vector<size_t>> seen;
  for (const ClusterRound& round : clustering.rounds) {
    std::vector<size_t> boundaries = round.snippets.Boundaries();
    if (!seen.insert(boundaries).second) continue;
    Annotation a;
    a.seed = seed;
    a.message_index = message_index;
    a.round = round.snippets.round;
    a.length = length;
    a.boundaries = std::move(boundaries);
    a.categories = round.snippets.Categories();
    a.data = DataFlags(round, format);
    out.push_back(std::move(a));
  }
  return out;
}

std::string AnnotationToJsonLine(const Annotation& a) {
  Json j;
  j["seed"] = a.seed;
  j["message_index"] = a.message_index;
  j["round"] = a.round;
  j["length"] = a.length;
  j["boundaries"] = a.boundaries;
  j["categories"] = a.categories;
  j["data"] = a.data;
  return j.dump();
}

std::string GroundTruthToJsonLine(const GroundTruth& g) {
  Json j;
  j["seed"] = g.seed;
  j["message_index"] = g.message_index;
  j["labels"] = g.labels;
  return j.dump();
}

namespace {

template <typename T, typename F>
absl::StatusOr<std::vector<T>> ReadLines(std::istream& in, F parse) {
  std::vector<T> out;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(Json::parse(line)));
    } catch (const Json::exception& e) {
      return MakeError(ErrorKind::kInvalidConfig, "line ", number, ": ", e.what());
    }
  }
  return out;
}

}  // namespace

absl::StatusOr<std::vector<Annotation>> ReadAnnotations(std::istream& in) {
  return ReadLines<Annotation>(in, [](const Json& j) {
    Annotation a;
    a.seed = j.at("seed").get<std::string>();
    a.message_index = j.at("message_index").get<size_t>();
    a.round = j.at("round").get<int>();
    a.length = j.at("length").get<size_t>();
    a.boundaries = j.at("boundaries").get<std::vector<size_t>>();
    a.categories = j.at("categories").get<std::vector<CategoryId>>();
    a.data = j.at("data").get<std::vector<bool>>();
    return a;
  });
}

absl::StatusOr<std::vector<GroundTruth>> ReadGroundTruth(std::istream& in) {
  return ReadLines<GroundTruth>(in, [](const Json& j) {
    GroundTruth g;
    g.seed = j.at("seed").get<std::string>();
    g.message_index = j.at("message_index").get<size_t>();
    g.labels = j.at("labels").get<ByteLabels>();
    return g;
  });
}

double Median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  return n % 2 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

absl::StatusOr<SegmentationEvaluation> EvaluateSegmentation(
    const std::vector<Annotation>& annotations,
    const std::vector<GroundTruth>& truth) {
  SegmentationEvaluation eval;
  std::vector<double> scores;
  for (const GroundTruth& g : truth) {
    std::optional<MessageScore> best;
    for (const Annotation& a : annotations) {
      if (a.seed != g.seed || a.message_index != g.message_index) continue;
      absl::StatusOr<double> s = SegmentationSimilarity(a.Labels(), g.labels);
      if (!s.ok()) return s.status();
      if (!best || *s > best->similarity) {
        best = MessageScore{g.seed, g.message_index, a.round, *s};
      }
    }
    if (!best) continue;
    scores.push_back(best->similarity);
    eval.messages.push_back(*best);
  }
  eval.median = Median(scores);
  double sum = 0;
  for (double s : scores) sum += s;
  eval.mean = scores.empty() ? 0.0 : sum / static_cast<double>(scores.size());
  return eval;
}

}  // namespace snipfuzz
