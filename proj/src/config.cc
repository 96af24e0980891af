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

#include "snipfuzz/config.h"

#include <fstream>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/hex.h"

namespace snipfuzz {

using Json = nlohmann::ordered_json;

std::string ModeName(Mode mode) {
  return mode == Mode::kSnippet ? "snippet" : "nosnippet";
}

absl::StatusOr<Mode> ParseMode(std::string_view name) {
  if (name == "snippet") return Mode::kSnippet;
  if (name == "nosnippet") return Mode::kNoSnippet;
  return MakeError(ErrorKind::kInvalidConfig, "unknown mode \"", name,
                   "\" (expected snippet or nosnippet)");
}

absl::Status CampaignConfig::Validate() const {
  if (absl::Status st = target.Validate(); !st.ok()) return st;
  if (time_budget_s && *time_budget_s < 0) {
    return MakeError(ErrorKind::kInvalidConfig, "negative time budget");
  }
  if (resend_attempts < 1) {
    return MakeError(ErrorKind::kInvalidConfig, "resend_attempts must be >= 1");
  }
  for (int r : mutation.repeat_counts) {
    if (r < 1) {
      return MakeError(ErrorKind::kInvalidConfig, "repeat count ", r, " < 1");
    }
  }
  return absl::OkStatus();
}

absl::Status ParseTargetAddress(std::string_view text, TargetConfig& target) {
  const size_t colon = text.rfind(':');
  uint32_t port = 0;
  if (colon == std::string_view::npos || colon == 0 ||
      !absl::SimpleAtoi(std::string(text.substr(colon + 1)), &port) ||
      port == 0 || port > 65535) {
    return MakeError(ErrorKind::kInvalidConfig, "target \"", text,
                     "\" is not host:port");
  }
  target.host = std::string(text.substr(0, colon));
  target.port = static_cast<uint16_t>(port);
  return absl::OkStatus();
}

Json ConfigToJson(const CampaignConfig& c) {
  Json j;
  Json t;
  t["host"] = c.target.host;
  t["port"] = c.target.port;
  t["protocol"] = c.target.protocol == Protocol::kTcp ? "tcp" : "udp";
  t["framing"] = c.target.framing.ToString();
  t["response_timeout_ms"] = c.target.response_timeout_ms;
  t["inter_message_delay_ms"] = c.target.inter_message_delay_ms;
  t["probe_repeat_interval_ms"] = c.target.probe_repeat_interval_ms;
  t["boot_wait_ms"] = c.target.boot_wait_ms;
  t["read_idle_ms"] = c.target.read_idle_ms;
  j["target"] = t;
  j["corpus"] = c.corpus_path;
  j["mode"] = ModeName(c.mode);
  j["time_budget_s"] = c.time_budget_s ? Json(*c.time_budget_s) : Json(nullptr);
  j["exec_budget"] = c.exec_budget ? Json(*c.exec_budget) : Json(nullptr);
  Json m;
  m["boundaries"] = c.mutation.boundaries;
  Json dict = Json::array();
  for (const ByteArray& d : c.mutation.dictionary) dict.push_back(HexEncode(d));
  m["dictionary"] = dict;
  m["repeat_counts"] = c.mutation.repeat_counts;
  m["byte_flip"] =
      c.mutation.byte_flip == ByteFlipMode::kComplement ? "complement" : "high_bit";
  m["havoc_budget"] = c.mutation.havoc_budget;
  m["max_message_length"] = c.mutation.max_message_length;
  j["mutation"] = m;
  j["rng_seed"] = c.rng_seed;
  j["out_dir"] = c.out_dir;
  j["resend_attempts"] = c.resend_attempts;
  return j;
}

absl::StatusOr<CampaignConfig> ConfigFromJson(const Json& j) {
  if (!j.is_object()) {
    return MakeError(ErrorKind::kInvalidConfig, "config must be a JSON object");
  }
  if (!j.contains("rng_seed") || !j["rng_seed"].is_number_unsigned()) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "rng_seed is mandatory (non-negative integer)");
  }
  CampaignConfig c;
  try {
    if (j.contains("target")) {
      const Json& t = j["target"];
      c.target.host = t.value("host", c.target.host);
      c.target.port = t.value("port", c.target.port);
      const std::string proto = t.value("protocol", std::string("tcp"));
      if (proto != "tcp" && proto != "udp") {
        return MakeError(ErrorKind::kInvalidConfig, "unknown protocol \"",
                         proto, "\"");
      }
      c.target.protocol = proto == "tcp" ? Protocol::kTcp : Protocol::kUdp;
      if (t.contains("framing")) {
        absl::StatusOr<Framing> f = Framing::Parse(t["framing"].get<std::string>());
        if (!f.ok()) return f.status();
        c.target.framing = *f;
      }
      c.target.response_timeout_ms =
          t.value("response_timeout_ms", c.target.response_timeout_ms);
      c.target.inter_message_delay_ms =
          t.value("inter_message_delay_ms", c.target.inter_message_delay_ms);
      c.target.probe_repeat_interval_ms =
          t.value("probe_repeat_interval_ms", c.target.probe_repeat_interval_ms);
      c.target.boot_wait_ms = t.value("boot_wait_ms", c.target.boot_wait_ms);
      c.target.read_idle_ms = t.value("read_idle_ms", c.target.read_idle_ms);
    }
    c.corpus_path = j.value("corpus", c.corpus_path);
    if (j.contains("mode")) {
      absl::StatusOr<Mode> mode = ParseMode(j["mode"].get<std::string>());
      if (!mode.ok()) return mode.status();
      c.mode = *mode;
    }
    if (j.contains("time_budget_s") && !j["time_budget_s"].is_null()) {
      c.time_budget_s = j["time_budget_s"].get<double>();
    }
    if (j.contains("exec_budget") && !j["exec_budget"].is_null()) {
      c.exec_budget = j["exec_budget"].get<uint64_t>();
    }
    if (j.contains("mutation")) {
      const Json& m = j["mutation"];
      if (m.contains("boundaries")) {
        c.mutation.boundaries = m["boundaries"].get<std::vector<int64_t>>();
      }
      if (m.contains("dictionary")) {
        c.mutation.dictionary.clear();
        for (const Json& d : m["dictionary"]) {
          absl::StatusOr<ByteArray> bytes = HexDecode(d.get<std::string>());
          if (!bytes.ok()) {
            return MakeError(ErrorKind::kInvalidConfig, "dictionary: ",
                             bytes.status().message());
          }
          c.mutation.dictionary.push_back(*std::move(bytes));
        }
      }
      if (m.contains("repeat_counts")) {
        c.mutation.repeat_counts = m["repeat_counts"].get<std::vector<int>>();
      }
      if (m.contains("byte_flip")) {
        const std::string flip = m["byte_flip"];
        if (flip == "complement") c.mutation.byte_flip = ByteFlipMode::kComplement;
        else if (flip == "high_bit") c.mutation.byte_flip = ByteFlipMode::kHighBit;
        else return MakeError(ErrorKind::kInvalidConfig, "unknown byte_flip \"", flip, "\"");
      }
      c.mutation.havoc_budget = m.value("havoc_budget", c.mutation.havoc_budget);
      c.mutation.max_message_length =
          m.value("max_message_length", c.mutation.max_message_length);
    }
    c.rng_seed = j["rng_seed"].get<uint64_t>();
    c.out_dir = j.value("out_dir", c.out_dir);
    c.resend_attempts = j.value("resend_attempts", c.resend_attempts);
  } catch (const Json::exception& e) {
    return MakeError(ErrorKind::kInvalidConfig, e.what());
  }
  return c;
}

absl::StatusOr<CampaignConfig> LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kInvalidConfig, "cannot read ", path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    return MakeError(ErrorKind::kInvalidConfig, path.string(), ": ", e.what());
  }
  return ConfigFromJson(j);
}

}  // namespace snipfuzz
