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

#ifndef SNIPFUZZ_REPORT_H_
#define SNIPFUZZ_REPORT_H_

#include <filesystem>
#include <string>

#include "absl/status/status.h"
#include "json.hpp"
#include "snipfuzz/campaign.h"

namespace snipfuzz {

// Full report. With `with_times` false, every wall-clock dependent field
// (timeline timestamps, elapsed time, crash event clocks) is left out, so two
// runs of a deterministic target serialize byte-identically.
nlohmann::ordered_json ReportToJson(const FuzzReport& report,
                                    bool with_times = true);

std::string ReportSummaryText(const FuzzReport& report);

// "timestamp_s,cumulative_categories" rows, one per distinct millisecond
// (the last count wins), so timestamps strictly increase.
std::string TimelineCsv(const FuzzReport& report);

// Writes report.json, summary.txt, timeline.csv, annotations.jsonl and
// corpus.json into `dir`, creating it if needed.
absl::Status WriteReport(const FuzzReport& report,
                         const std::filesystem::path& dir);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_REPORT_H_
