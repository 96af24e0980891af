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

#ifndef SNIPFUZZ_SEGMENTATION_H_
#define SNIPFUZZ_SEGMENTATION_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "snipfuzz/message.h"
#include "snipfuzz/snippet_inference.h"

namespace snipfuzz {

// Per-byte label vectors: 1 = data, 0 = non-data.
using ByteLabels = std::vector<uint8_t>;

// Fraction of bytes on which the two labelings agree. LengthMismatch when
// the vectors differ in length; two empty vectors agree fully.
absl::StatusOr<double> SegmentationSimilarity(const ByteLabels& inferred,
                                              const ByteLabels& truth);

// The category that answered most probes of a message: deleting a byte
// usually breaks the syntax, so this is the parser's format-error reply.
// Ties go to the lower id; kNonResponsive never wins. Returns kNonResponsive
// when no byte got a real category.
CategoryId DominantCategory(const std::vector<CategoryId>& byte_categories);

// A snippet is data-bearing when none of the categories merged into its
// cluster is the format-error category.
std::vector<bool> DataFlags(const ClusterRound& round,
                            CategoryId format_category);

// One inferred partition with its data labels.
struct Annotation {
  SeedId seed;
  size_t message_index = 0;
  int round = 0;
  size_t length = 0;
  std::vector<size_t> boundaries;
  std::vector<CategoryId> categories;
  std::vector<bool> data;

  ByteLabels Labels() const;
};

// Annotations for every round of a clustering result, deduplicated by
// boundaries (the earliest round of a repeated partition is kept).
std::vector<Annotation> AnnotateRounds(const SeedId& seed, size_t message_index,
                                       size_t length,
                                       const std::vector<CategoryId>& byte_categories,
                                       const ClusteringResult& clustering);

// Ground truth for one message.
struct GroundTruth {
  SeedId seed;
  size_t message_index = 0;
  ByteLabels labels;
};

std::string AnnotationToJsonLine(const Annotation& a);
std::string GroundTruthToJsonLine(const GroundTruth& g);
absl::StatusOr<std::vector<Annotation>> ReadAnnotations(std::istream& in);
absl::StatusOr<std::vector<GroundTruth>> ReadGroundTruth(std::istream& in);

struct MessageScore {
  SeedId seed;
  size_t message_index = 0;
  int best_round = 0;
  double similarity = 0.0;
};

struct SegmentationEvaluation {
  std::vector<MessageScore> messages;
  double median = 0.0;
  double mean = 0.0;
};

// Scores every ground-truth message against its best-matching annotated
// round. Messages without annotations are skipped; length disagreements are
// LengthMismatch.
absl::StatusOr<SegmentationEvaluation> EvaluateSegmentation(
    const std::vector<Annotation>& annotations,
    const std::vector<GroundTruth>& truth);

double Median(std::vector<double> values);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_SEGMENTATION_H_
