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

#include "snipfuzz/findings_log.h"

#include <fstream>

#include "absl/strings/str_cat.h"
#include "snipfuzz/corpus.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/hex.h"

namespace snipfuzz {

using Json = nlohmann::ordered_json;

namespace {

Json SequenceToJson(const MessageSequence& seq) {
  Json out = Json::array();
  for (const Message& m : seq) out.push_back(HexEncode(m));
  return out;
}

absl::StatusOr<MessageSequence> SequenceFromJson(const Json& j) {
  MessageSequence seq;
  for (const Json& m : j) {
    absl::StatusOr<ByteArray> bytes = HexDecode(m.get<std::string>());
    if (!bytes.ok()) return bytes.status();
    seq.push_back(*std::move(bytes));
  }
  return seq;
}

std::optional<ExecKind> ParseExecKind(const std::string& name) {
  for (ExecKind k : {ExecKind::kBaseline, ExecKind::kProbe, ExecKind::kMutation,
                     ExecKind::kHavoc, ExecKind::kConfirm, ExecKind::kNoSnippet}) {
    if (ExecKindName(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace

std::string ExecKindName(ExecKind kind) {
  switch (kind) {
    case ExecKind::kBaseline: return "baseline";
    case ExecKind::kProbe: return "probe";
    case ExecKind::kMutation: return "mutation";
    case ExecKind::kHavoc: return "havoc";
    case ExecKind::kConfirm: return "confirm";
    case ExecKind::kNoSnippet: return "nosnippet";
  }
  return "unknown";
}

Json PlanToJson(const MutationPlan& plan) {
  Json j;
  j["seed"] = plan.seed;
  j["message_index"] = plan.message_index;
  j["round"] = plan.round;
  Json targets = Json::array();
  for (const PlanTarget& t : plan.targets) {
    Json tj;
    tj["snippet"] = t.snippet_index;
    tj["scheme"] = t.scheme.Name();
    tj["kind"] = static_cast<int>(t.scheme.kind);
    tj["index"] = t.scheme.index;
    tj["count"] = t.scheme.count;
    targets.push_back(tj);
  }
  j["targets"] = targets;
  j["havoc"] = plan.havoc;
  j["rng_seed"] = plan.rng_seed;
  return j;
}

absl::StatusOr<MutationPlan> PlanFromJson(const Json& j) {
  MutationPlan plan;
  try {
    plan.seed = j.at("seed").get<std::string>();
    plan.message_index = j.at("message_index").get<size_t>();
    plan.round = j.at("round").get<int>();
    for (const Json& t : j.at("targets")) {
      PlanTarget target;
      target.snippet_index = t.at("snippet").get<size_t>();
      const int kind = t.at("kind").get<int>();
      if (kind < 0 || kind > static_cast<int>(MutationScheme::Kind::kRepeat)) {
        return MakeError(ErrorKind::kMalformedCorpus, "bad scheme kind ", kind);
      }
      target.scheme.kind = static_cast<MutationScheme::Kind>(kind);
      target.scheme.index = t.at("index").get<size_t>();
      target.scheme.count = t.at("count").get<int>();
      plan.targets.push_back(target);
    }
    plan.havoc = j.at("havoc").get<bool>();
    plan.rng_seed = j.at("rng_seed").get<uint64_t>();
  } catch (const Json::exception& e) {
    return MakeError(ErrorKind::kMalformedCorpus, "plan: ", e.what());
  }
  return plan;
}

Json CrashToJson(const CrashRecord& crash, bool with_times) {
  Json j;
  j["exec"] = crash.exec;
  j["seed"] = crash.seed;
  j["message_index"] = crash.message_index;
  j["verdict"] = VerdictName(crash.verdict);
  j["during_restore"] = crash.during_restore;
  j["sequence"] = SequenceToJson(crash.sequence);
  j["plan"] = crash.plan ? PlanToJson(*crash.plan) : Json(nullptr);
  Json timeline = Json::array();
  for (const MonitorEvent& e : crash.timeline) {
    Json ej;
    ej["event"] = MonitorEventName(e.kind);
    ej["attempt"] = e.attempt;
    ej["detail"] = e.detail;
    if (with_times) {
      ej["wall_clock_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                e.wall_clock.time_since_epoch())
                                .count();
    }
    timeline.push_back(ej);
  }
  j["timeline"] = timeline;
  return j;
}

void FindingsLog::Write(const Json& j) {
  if (out_ == nullptr) return;
  *out_ << j.dump() << '\n';
  out_->flush();
}

void FindingsLog::Header(const CampaignConfig& config, const SeedCorpus& corpus) {
  Json j;
  j["type"] = "header";
  j["config"] = ConfigToJson(config);
  j["corpus"] = Json::parse(SerializeSeedCorpus(corpus));
  Write(j);
}

void FindingsLog::Exec(const ExecRecord& r) {
  Json j;
  j["type"] = "exec";
  j["exec"] = r.exec;
  j["kind"] = ExecKindName(r.kind);
  j["seed"] = r.seed;
  j["message_index"] = r.message_index;
  j["probe"] = r.probe;
  j["plan"] = r.plan ? PlanToJson(*r.plan) : Json(nullptr);
  j["sequence"] = SequenceToJson(r.sequence);
  Write(j);
}

void FindingsLog::Category(const SeedId& seed, size_t message_index,
                           CategoryId category, uint64_t exec) {
  Json j;
  j["type"] = "category";
  j["seed"] = seed;
  j["message_index"] = message_index;
  j["category"] = category;
  j["exec"] = exec;
  Write(j);
}

void FindingsLog::NewSeed(const Seed& seed, uint64_t exec) {
  Json j;
  j["type"] = "seed";
  j["id"] = seed.id;
  j["parent"] = seed.origin.parent;
  j["message_index"] = seed.origin.message_index;
  j["category"] = seed.origin.category;
  j["exec"] = exec;
  j["sequence"] = SequenceToJson(seed.sequence);
  Write(j);
}

void FindingsLog::Crash(const CrashRecord& crash) {
  Json j = CrashToJson(crash, true);
  j["type"] = "crash";
  Write(j);
}

void FindingsLog::Summary(uint64_t executions, uint64_t transmissions,
                          const std::string& stop_reason) {
  Json j;
  j["type"] = "summary";
  j["executions"] = executions;
  j["transmissions"] = transmissions;
  j["stop_reason"] = stop_reason;
  Write(j);
}

absl::StatusOr<LoggedCampaign> ReadFindingsLog(std::istream& in) {
  LoggedCampaign out;
  bool have_header = false;
  bool have_summary = false;
  std::string line;
  size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    auto fail = [&](const auto& why) {
      return MakeError(ErrorKind::kMalformedCorpus, "findings log line ",
                       number, ": ", why);
    };
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::parse_error& e) {
      return fail(e.what());
    }
    const std::string type = j.value("type", std::string());
    try {
      if (type == "header") {
        absl::StatusOr<CampaignConfig> config = ConfigFromJson(j.at("config"));
        if (!config.ok()) return fail(config.status().message());
        absl::StatusOr<SeedCorpus> corpus = ParseSeedCorpus(j.at("corpus").dump());
        if (!corpus.ok()) return fail(corpus.status().message());
        out.config = *std::move(config);
        out.corpus = *std::move(corpus);
        have_header = true;
      } else if (type == "exec") {
        ExecRecord r;
        r.exec = j.at("exec").get<uint64_t>();
        std::optional<ExecKind> kind = ParseExecKind(j.at("kind").get<std::string>());
        if (!kind) return fail("unknown exec kind");
        r.kind = *kind;
        r.seed = j.at("seed").get<std::string>();
        r.message_index = j.at("message_index").get<size_t>();
        r.probe = j.at("probe").get<size_t>();
        if (!j.at("plan").is_null()) {
          absl::StatusOr<MutationPlan> plan = PlanFromJson(j["plan"]);
          if (!plan.ok()) return fail(plan.status().message());
          r.plan = *std::move(plan);
        }
        absl::StatusOr<MessageSequence> seq = SequenceFromJson(j.at("sequence"));
        if (!seq.ok()) return fail(seq.status().message());
        r.sequence = *std::move(seq);
        out.execs.push_back(std::move(r));
      } else if (type == "crash") {
        ++out.crashes;
      } else if (type == "summary") {
        out.executions = j.at("executions").get<uint64_t>();
        out.stop_reason = j.value("stop_reason", std::string());
        have_summary = true;
      }
    } catch (const Json::exception& e) {
      return fail(e.what());
    }
  }
  if (!have_header) {
    return MakeError(ErrorKind::kMalformedCorpus, "findings log has no header");
  }
  if (!have_summary) out.executions = out.execs.size();
  return out;
}

absl::StatusOr<LoggedCampaign> ReadFindingsLog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kMalformedCorpus, "cannot read ", path.string());
  }
  absl::StatusOr<LoggedCampaign> log = ReadFindingsLog(in);
  if (!log.ok()) {
    return absl::Status(log.status().code(),
                        absl::StrCat(log.status().message(), " (", path.string(), ")"));
  }
  return log;
}

}  // namespace snipfuzz
