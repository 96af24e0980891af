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

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "snipfuzz/errors.h"
#include "snipfuzz/mock_device.h"

namespace snipfuzz::mock {

namespace {

using Json = nlohmann::json;

absl::Status Invalid(const std::string& what) {
  return MakeError(ErrorKind::kInvalidConfig, "device profile: ", what);
}

absl::StatusOr<FieldSpec> ParseFieldSpec(const Json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    return Invalid(absl::StrCat(where, ": handler needs a \"type\""));
  }
  FieldSpec spec;
  const std::string type = j["type"];
  if (type == "bool") spec.type = FieldSpec::Type::kBool;
  else if (type == "int") spec.type = FieldSpec::Type::kInt;
  else if (type == "number") spec.type = FieldSpec::Type::kNumber;
  else if (type == "enum") spec.type = FieldSpec::Type::kEnum;
  else if (type == "string") spec.type = FieldSpec::Type::kString;
  else if (type == "object") spec.type = FieldSpec::Type::kObject;
  else if (type == "array") spec.type = FieldSpec::Type::kArray;
  else if (type == "bytes") spec.type = FieldSpec::Type::kBytes;
  else return Invalid(absl::StrCat(where, ": unknown type \"", type, "\""));

  try {
    if (j.contains("min")) spec.min = j["min"].get<int64_t>();
    if (j.contains("max")) spec.max = j["max"].get<int64_t>();
    if (j.contains("values")) {
      for (const Json& v : j["values"]) {
        spec.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
    if (j.contains("length")) spec.length = j["length"].get<size_t>();
    if (j.contains("max_length")) spec.max_length = j["max_length"].get<size_t>();
  } catch (const Json::exception& e) {
    return Invalid(absl::StrCat(where, ": ", e.what()));
  }
  if (j.contains("fields")) {
    for (const auto& [key, sub] : j["fields"].items()) {
      absl::StatusOr<FieldSpec> f = ParseFieldSpec(sub, where + "." + key);
      if (!f.ok()) return f.status();
      spec.fields.emplace(key, *std::move(f));
    }
  }
  if (j.contains("item")) {
    absl::StatusOr<FieldSpec> f = ParseFieldSpec(j["item"], where + "[]");
    if (!f.ok()) return f.status();
    spec.item = std::make_shared<FieldSpec>(*std::move(f));
  }
  if (spec.type == FieldSpec::Type::kArray && spec.item == nullptr) {
    return Invalid(absl::StrCat(where, ": array handler needs \"item\""));
  }
  return spec;
}

const FieldSpec* ResolveSpec(const DeviceProfile& profile,
                             const std::string& path) {
  std::vector<std::string> parts = absl::StrSplit(path, '.');
  auto it = profile.functions.find(parts[0]);
  if (it == profile.functions.end()) return nullptr;
  const FieldSpec* spec = &it->second;
  for (size_t i = 1; i < parts.size(); ++i) {
    if (spec->type == FieldSpec::Type::kArray) spec = spec->item.get();
    auto sub = spec->fields.find(parts[i]);
    if (sub == spec->fields.end()) return nullptr;
    spec = &sub->second;
  }
  return spec;
}

}  // namespace

absl::StatusOr<DeviceProfile> ParseDeviceProfile(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    return Invalid(e.what());
  }
  if (!j.is_object()) return Invalid("top level must be an object");
  DeviceProfile p;
  try {
    p.name = j.value("name", p.name);
    const std::string grammar = j.value("grammar", std::string("json"));
    if (grammar == "json") p.grammar = Grammar::kJsonLike;
    else if (grammar == "keyvalue") p.grammar = Grammar::kKeyValue;
    else if (grammar == "custombyte") p.grammar = Grammar::kCustomByte;
    else return Invalid(absl::StrCat("unknown grammar \"", grammar, "\""));
    p.address = j.value("address", p.address);
    if (j.contains("functions")) {
      for (const auto& [key, sub] : j["functions"].items()) {
        absl::StatusOr<FieldSpec> f = ParseFieldSpec(sub, key);
        if (!f.ok()) return f.status();
        p.functions.emplace(key, *std::move(f));
      }
    }
    if (j.contains("initial_state")) {
      for (const auto& [key, v] : j["initial_state"].items()) {
        // JSON devices keep rendered values ("\"none\""), the others raw text.
        p.initial_state[key] = p.grammar == Grammar::kJsonLike || !v.is_string()
                                   ? v.dump()
                                   : v.get<std::string>();
      }
    }
    if (j.contains("faults")) {
      for (const Json& f : j["faults"]) {
        FaultSpec fault;
        const Json& t = f.at("trigger");
        const std::string kind = t.at("kind");
        if (kind == "type_mismatch") {
          fault.trigger.kind = FaultSpec::Trigger::Kind::kTypeMismatch;
          fault.trigger.expected = t.at("expected");
          fault.trigger.found = t.at("found");
        } else if (kind == "empty_value") {
          fault.trigger.kind = FaultSpec::Trigger::Kind::kEmptyValue;
        } else if (kind == "oversized") {
          fault.trigger.kind = FaultSpec::Trigger::Kind::kOversized;
          fault.trigger.max_length = t.at("max_length");
        } else {
          return Invalid(absl::StrCat("unknown trigger \"", kind, "\""));
        }
        fault.trigger.path = t.at("path");
        const Json& b = f.at("behavior");
        const std::string behavior = b.at("kind");
        if (behavior == "hang") {
          fault.behavior.kind = FaultSpec::Behavior::Kind::kSilentHang;
          if (b.contains("duration_ms")) {
            fault.behavior.duration_ms = b["duration_ms"].get<int>();
          }
        } else if (behavior == "abort") {
          fault.behavior.kind = FaultSpec::Behavior::Kind::kProcessAbort;
        } else if (behavior == "corrupt") {
          fault.behavior.kind = FaultSpec::Behavior::Kind::kCorruptReply;
        } else {
          return Invalid(absl::StrCat("unknown behavior \"", behavior, "\""));
        }
        p.faults.push_back(std::move(fault));
      }
    }
    if (j.contains("randomness")) {
      for (const Json& r : j["randomness"]) {
        RandomField field;
        field.name = r.at("name");
        const std::string kind = r.at("kind");
        if (kind == "timestamp") field.kind = RandomField::Kind::kTimestamp;
        else if (kind == "token") field.kind = RandomField::Kind::kToken;
        else return Invalid(absl::StrCat("unknown randomness \"", kind, "\""));
        field.length = r.value("length", field.length);
        p.randomness.push_back(std::move(field));
      }
    }
    p.rng_seed = j.value("rng_seed", p.rng_seed);
    if (j.contains("framing")) {
      absl::StatusOr<Framing> framing =
          Framing::Parse(j["framing"].get<std::string>());
      if (!framing.ok()) return Invalid(std::string(framing.status().message()));
      p.framing = *framing;
    }
    const std::string protocol = j.value("protocol", std::string("tcp"));
    if (protocol == "tcp") p.protocol = Protocol::kTcp;
    else if (protocol == "udp") p.protocol = Protocol::kUdp;
    else return Invalid(absl::StrCat("unknown protocol \"", protocol, "\""));
    p.port = j.value("port", p.port);
  } catch (const Json::exception& e) {
    return Invalid(e.what());
  }
  if (absl::Status st = ValidateProfile(p); !st.ok()) return st;
  return p;
}

absl::StatusOr<DeviceProfile> LoadDeviceProfile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    return MakeError(ErrorKind::kInvalidConfig, "cannot read ", path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  absl::StatusOr<DeviceProfile> p = ParseDeviceProfile(buf.str());
  if (!p.ok()) {
    return absl::Status(p.status().code(),
                        absl::StrCat(p.status().message(), " (", path.string(), ")"));
  }
  return p;
}

absl::Status ValidateProfile(const DeviceProfile& profile) {
  if (profile.functions.empty()) return Invalid("no functions declared");
  for (const FaultSpec& fault : profile.faults) {
    if (ResolveSpec(profile, fault.trigger.path) == nullptr) {
      return Invalid(absl::StrCat("fault path \"", fault.trigger.path,
                                  "\" does not reach a handler"));
    }
  }
  for (const RandomField& field : profile.randomness) {
    if (field.name.empty()) return Invalid("random field without a name");
    if (field.kind == RandomField::Kind::kToken &&
        (field.length == 0 || field.length > 64)) {
      return Invalid(absl::StrCat("token \"", field.name,
                                  "\" length must be 1..64"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ResponseScript> ParseResponseScript(std::string_view json_text) {
  auto action = [](const Json& j) -> std::optional<ResponseScript::Action> {
    if (!j.is_string()) return std::nullopt;
    if (j == "reply") return ResponseScript::Action::kReply;
    if (j == "drop") return ResponseScript::Action::kDrop;
    return std::nullopt;
  };
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    return MakeError(ErrorKind::kInvalidConfig, "script: ", e.what());
  }
  ResponseScript script;
  if (!j.is_object()) {
    return MakeError(ErrorKind::kInvalidConfig, "script must be an object");
  }
  if (j.contains("schedule")) {
    if (!j["schedule"].is_array()) {
      return MakeError(ErrorKind::kInvalidConfig, "schedule must be an array");
    }
    for (const Json& a : j["schedule"]) {
      std::optional<ResponseScript::Action> act = action(a);
      if (!act) {
        return MakeError(ErrorKind::kInvalidConfig, "bad action ", a.dump());
      }
      script.schedule.push_back(*act);
    }
  }
  if (j.contains("then")) {
    std::optional<ResponseScript::Action> act = action(j["then"]);
    if (!act) {
      return MakeError(ErrorKind::kInvalidConfig, "bad action ", j["then"].dump());
    }
    script.then = *act;
  }
  return script;
}

}  // namespace snipfuzz::mock
