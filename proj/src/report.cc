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

#include "snipfuzz/report.h"

#include <fstream>
#include <system_error>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "snipfuzz/corpus.h"
#include "snipfuzz/findings_log.h"
#include "snipfuzz/hex.h"

namespace snipfuzz {

using Json = nlohmann::ordered_json;

Json ReportToJson(const FuzzReport& report, bool with_times) {
  Json j;
  j["config"] = ConfigToJson(report.config);

  const CampaignStats& s = report.stats;
  Json stats;
  stats["executions"] = s.executions;
  stats["categories"] = s.categories;
  stats["seeds_added"] = s.seeds_added;
  stats["plans_executed"] = s.plans_executed;
  stats["plans_skipped"] = s.plans_skipped;
  stats["crashes"] = report.findings.size();
  Json tx;
  tx["baseline"] = s.tx.baseline;
  tx["probes"] = s.tx.probes;
  tx["mutations"] = s.tx.mutations;
  tx["confirmations"] = s.tx.confirmations;
  tx["restores"] = s.tx.restores;
  tx["crash_resends"] = s.tx.crash_resends;
  tx["reconnect_resends"] = s.tx.reconnect_resends;
  tx["total"] = s.tx.total();
  tx["transport"] = s.transport_transmissions;
  tx["reconciled"] = s.tx.total() == s.transport_transmissions;
  stats["transmissions"] = tx;
  if (with_times) stats["elapsed_ms"] = s.elapsed_ms;
  stats["stop_reason"] = s.stop_reason;
  j["stats"] = stats;

  Json timeline = Json::array();
  for (const TimelinePoint& p : report.timeline) {
    Json pj;
    if (with_times) pj["t_ms"] = p.t_ms;
    pj["exec"] = p.exec;
    pj["categories"] = p.categories;
    timeline.push_back(pj);
  }
  j["timeline"] = timeline;

  Json findings = Json::array();
  for (const CrashRecord& c : report.findings) {
    findings.push_back(CrashToJson(c, with_times));
  }
  j["findings"] = findings;

  Json seeds = Json::array();
  for (const Seed& seed : report.corpus.seeds) {
    Json sj;
    sj["id"] = seed.id;
    Json origin;
    if (seed.origin.kind == SeedOrigin::Kind::kInitial) {
      origin["kind"] = "initial";
    } else {
      origin["kind"] = "new_category";
      origin["parent"] = seed.origin.parent;
      origin["message_index"] = seed.origin.message_index;
      origin["category"] = seed.origin.category;
    }
    sj["origin"] = origin;
    Json messages = Json::array();
    for (const Message& m : seed.sequence) messages.push_back(HexEncode(m));
    sj["messages"] = messages;
    Json snippets = Json::object();
    for (const auto& [index, sets] : seed.snippet_annotations) {
      Json rounds = Json::array();
      for (const SnippetSet& set : sets) {
        rounds.push_back({{"round", set.round},
                          {"boundaries", set.Boundaries()},
                          {"categories", set.Categories()}});
      }
      snippets[absl::StrCat(index)] = rounds;
    }
    sj["snippets"] = snippets;
    seeds.push_back(sj);
  }
  j["seeds"] = seeds;
  return j;
}

std::string ReportSummaryText(const FuzzReport& report) {
  const CampaignStats& s = report.stats;
  std::string out;
  absl::StrAppendFormat(&out, "mode:               %s\n",
                        ModeName(report.config.mode));
  absl::StrAppendFormat(&out, "target:             %s:%d\n",
                        report.config.target.host, report.config.target.port);
  absl::StrAppendFormat(&out, "rng seed:           %d\n", report.config.rng_seed);
  absl::StrAppendFormat(&out, "stopped by:         %s after %.1f s\n",
                        s.stop_reason, static_cast<double>(s.elapsed_ms) / 1000.0);
  absl::StrAppendFormat(&out, "executions:         %d\n", s.executions);
  absl::StrAppendFormat(&out, "response categories: %d\n", s.categories);
  absl::StrAppendFormat(&out, "seeds added:        %d (corpus now %d)\n",
                        s.seeds_added, report.corpus.seeds.size());
  absl::StrAppendFormat(&out, "plans:              %d executed, %d skipped\n",
                        s.plans_executed, s.plans_skipped);
  absl::StrAppendFormat(
      &out,
      "transmissions:      %d (baseline %d, probes %d, mutations %d, "
      "confirmations %d, restores %d, crash resends %d, reconnects %d)%s\n",
      s.tx.total(), s.tx.baseline, s.tx.probes, s.tx.mutations,
      s.tx.confirmations, s.tx.restores, s.tx.crash_resends,
      s.tx.reconnect_resends,
      s.tx.total() == s.transport_transmissions
          ? ""
          : absl::StrCat(" MISMATCH: transport counted ",
                         s.transport_transmissions));
  absl::StrAppendFormat(&out, "crashes:            %d\n", report.findings.size());
  for (const CrashRecord& c : report.findings) {
    absl::StrAppendFormat(&out, "  exec %d  seed %s  message %d  %s%s\n", c.exec,
                          c.seed, c.message_index, VerdictName(c.verdict),
                          c.during_restore ? "  (during restore)" : "");
    for (const Message& m : c.sequence) {
      absl::StrAppendFormat(&out, "    %s\n", EscapeBytes(m));
    }
  }
  return out;
}

std::string TimelineCsv(const FuzzReport& report) {
  std::string out = "timestamp_s,cumulative_categories\n";
  const auto& t = report.timeline;
  for (size_t i = 0; i < t.size(); ++i) {
    if (i + 1 < t.size() && t[i + 1].t_ms == t[i].t_ms) continue;
    absl::StrAppendFormat(&out, "%.3f,%d\n", static_cast<double>(t[i].t_ms) / 1000.0,
                          t[i].categories);
  }
  return out;
}

namespace {

absl::Status WriteFile(const std::filesystem::path& path,
                       const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path.string()));
  out << contents;
  out.close();
  if (!out) return absl::UnavailableError(absl::StrCat("error writing ", path.string()));
  return absl::OkStatus();
}

}  // namespace

absl::Status WriteReport(const FuzzReport& report,
                         const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    return absl::UnavailableError(
        absl::StrCat("cannot create ", dir.string(), ": ", ec.message()));
  }
  std::string annotations;
  for (const Annotation& a : report.annotations) {
    absl::StrAppend(&annotations, AnnotationToJsonLine(a), "\n");
  }
  for (const auto& [name, contents] :
       std::vector<std::pair<std::string, std::string>>{
           {"report.json", ReportToJson(report).dump(2) + "\n"},
           {"summary.txt", ReportSummaryText(report)},
           {"timeline.csv", TimelineCsv(report)},
           {"annotations.jsonl", annotations},
           {"corpus.json", SerializeSeedCorpus(report.corpus)}}) {
    if (absl::Status st = WriteFile(dir / name, contents); !st.ok()) return st;
  }
  return absl::OkStatus();
}

}  // namespace snipfuzz
