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

#include <algorithm>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "snipfuzz/mock_device.h"

namespace snipfuzz::mock {

namespace {

using Clock = std::chrono::steady_clock;

struct Problem {
  enum class Kind { kUnknown, kInvalid };
  Kind kind;
  std::vector<std::string> path;  // from the command key down
  std::string raw;                // offending value, as rendered
};

bool IsInteger(const std::string& text) {
  int64_t unused;
  return absl::SimpleAtoi(text, &unused) &&
         text.find_first_of(".eE+") == std::string::npos;
}

// Checks `value` against `spec`. JSON values must carry the right type;
// key=value inputs are untyped text, so only the text is checked.
std::optional<Problem> Check(const FieldSpec& spec, const Value& value,
                             std::vector<std::string> path, bool typed) {
  auto invalid = [&] {
    return Problem{Problem::Kind::kInvalid, path, value.Render()};
  };
  using T = FieldSpec::Type;
  using V = Value::Type;
  switch (spec.type) {
    case T::kBool:
      if (typed ? value.type != V::kBool
                : value.text != "true" && value.text != "false") {
        return invalid();
      }
      return std::nullopt;
    case T::kInt: {
      if (typed && value.type != V::kNumber) return invalid();
      int64_t n = 0;
      if (!IsInteger(value.text) || !absl::SimpleAtoi(value.text, &n) ||
          n < spec.min || n > spec.max) {
        return invalid();
      }
      return std::nullopt;
    }
    case T::kNumber: {
      double d = 0;
      if (typed ? value.type != V::kNumber : !absl::SimpleAtod(value.text, &d)) {
        return invalid();
      }
      return std::nullopt;
    }
    case T::kEnum:
      if ((typed && value.type != V::kString) ||
          std::find(spec.values.begin(), spec.values.end(), value.text) ==
              spec.values.end()) {
        return invalid();
      }
      return std::nullopt;
    case T::kString:
      if ((typed && value.type != V::kString) ||
          (spec.max_length && value.text.size() > *spec.max_length)) {
        return invalid();
      }
      return std::nullopt;
    case T::kObject:
      if (value.type != V::kObject) return invalid();
      for (const auto& [key, member] : value.members) {
        std::vector<std::string> sub = path;
        sub.push_back(key);
        auto it = spec.fields.find(key);
        if (it == spec.fields.end()) {
          return Problem{Problem::Kind::kUnknown, sub, member.Render()};
        }
        if (auto p = Check(it->second, member, sub, typed)) return p;
      }
      return std::nullopt;
    case T::kArray:
      if (value.type != V::kArray) return invalid();
      if (spec.length && value.items.size() != *spec.length) return invalid();
      for (size_t i = 0; i < value.items.size(); ++i) {
        std::vector<std::string> sub = path;
        sub.push_back(absl::StrCat(i));
        if (auto p = Check(*spec.item, value.items[i], sub, typed)) return p;
      }
      return std::nullopt;
    case T::kBytes: {
      if (value.type != V::kBytes) return invalid();
      if (spec.length && value.text.size() != *spec.length) return invalid();
      for (char c : value.text) {
        const int b = static_cast<uint8_t>(c);
        if (b < spec.min || b > spec.max) return invalid();
        if (!spec.values.empty() &&
            std::find(spec.values.begin(), spec.values.end(), absl::StrCat(b)) ==
                spec.values.end()) {
          return invalid();
        }
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// All values reachable from `root` along a dotted path. Arrays are searched
// element-wise so a path keeps matching when an object degrades into an
// array of one-member objects.
void Resolve(const Value& root, const std::vector<std::string>& parts,
             size_t depth, std::vector<const Value*>& out) {
  if (depth == parts.size()) {
    out.push_back(&root);
    return;
  }
  if (root.type == Value::Type::kObject) {
    if (const Value* v = root.Member(parts[depth])) Resolve(*v, parts, depth + 1, out);
  } else if (root.type == Value::Type::kArray) {
    for (const Value& item : root.items) Resolve(item, parts, depth, out);
  }
}

ByteArray Bytes(std::string_view s) { return ByteArray(s.begin(), s.end()); }

}  // namespace

MockDevice::MockDevice(DeviceProfile profile)
    : profile_(std::move(profile)),
      state_(profile_.initial_state),
      rng_(profile_.rng_seed),
      boot_time_(Clock::now()) {}

HandleResult MockDevice::Handle(const ByteArray& input) {
  std::lock_guard<std::mutex> lock(mu_);
  return HandleLocked(input);
}

HandleResult MockDevice::HandleLocked(const ByteArray& input) {
  ++received_;
  ResponseScript::Action action = script_.then;
  if (!script_.schedule.empty()) {
    action = script_.schedule.front();
    script_.schedule.pop_front();
  }
  HandleResult result;
  if (aborted_ || hung_) return result;
  if (Clock::now() < hang_until_) return result;

  std::optional<ParsedInput> parsed = Parse(profile_.grammar, input);
  if (parsed) {
    if (std::optional<FaultSpec::Behavior> fault = MatchFault(*parsed)) {
      result.fault_fired = true;
      switch (fault->kind) {
        case FaultSpec::Behavior::Kind::kSilentHang:
          if (fault->duration_ms) {
            hang_until_ = Clock::now() + std::chrono::milliseconds(*fault->duration_ms);
          } else {
            hung_ = true;
          }
          return result;
        case FaultSpec::Behavior::Kind::kProcessAbort:
          aborted_ = true;
          return result;
        case FaultSpec::Behavior::Kind::kCorruptReply: {
          ByteArray garbage(16);
          for (uint8_t& b : garbage) b = static_cast<uint8_t>(rng_());
          if (action == ResponseScript::Action::kReply) {
            result.reply = std::move(garbage);
            ++replied_;
          }
          return result;
        }
      }
    }
  }
  ByteArray reply = Render(parsed ? &*parsed : nullptr);
  if (action == ResponseScript::Action::kReply) {
    result.reply = std::move(reply);
    ++replied_;
  }
  return result;
}

std::optional<FaultSpec::Behavior> MockDevice::MatchFault(
    const ParsedInput& parsed) const {
  for (const FaultSpec& fault : profile_.faults) {
    std::vector<std::string> parts = absl::StrSplit(fault.trigger.path, '.');
    std::vector<const Value*> hits;
    for (const Field& field : parsed.fields) {
      if (field.key == parts[0]) Resolve(field.value, parts, 1, hits);
    }
    for (const Value* v : hits) {
      bool fire = false;
      switch (fault.trigger.kind) {
        case FaultSpec::Trigger::Kind::kTypeMismatch:
          fire = TypeName(v->type) == fault.trigger.found;
          break;
        case FaultSpec::Trigger::Kind::kEmptyValue:
          fire = (v->type == Value::Type::kString ||
                  v->type == Value::Type::kBytes) &&
                 v->text.empty();
          break;
        case FaultSpec::Trigger::Kind::kOversized:
          fire = v->Render().size() > fault.trigger.max_length;
          break;
      }
      if (fire) return fault.behavior;
    }
  }
  return std::nullopt;
}

std::string MockDevice::RandomValue(const RandomField& field) {
  if (field.kind == RandomField::Kind::kTimestamp) {
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
        Clock::now() - boot_time_);
    return absl::StrFormat("%010d", ms.count());
  }
  // Consecutive tokens come from disjoint alphabets, so two replies differ
  // in every token position.
  const char base = (random_counter_++ % 2 == 0) ? 'a' : 'A';
  std::string token(field.length, base);
  for (char& c : token) c = static_cast<char>(base + rng_() % 26);
  return token;
}

ByteArray MockDevice::Render(const ParsedInput* parsed) {
  const std::string& addr = profile_.address;
  const bool typed = profile_.grammar == Grammar::kJsonLike;

  if (profile_.grammar == Grammar::kCustomByte) {
    ByteArray out;
    if (parsed == nullptr || parsed->fields.empty()) {
      out = {0xee, 0x00};
    } else {
      const Field& f = parsed->fields[0];
      const auto opcode =
          static_cast<uint8_t>(std::stoul(f.key, nullptr, 16));
      auto it = profile_.functions.find(f.key);
      if (it == profile_.functions.end()) {
        out = {0xee, 0x01, opcode};
      } else if (it->second.length && f.value.text.size() != *it->second.length) {
        out = {0xee, 0x02, opcode, static_cast<uint8_t>(f.value.text.size())};
      } else if (Check(it->second, f.value, {f.key}, true)) {
        out = {0xee, 0x03, opcode};
      } else {
        out = {0xaa, opcode};
        out.insert(out.end(), f.value.text.begin(), f.value.text.end());
        state_[f.key] = f.value.Render();
      }
    }
    for (const RandomField& r : profile_.randomness) {
      const std::string v = RandomValue(r);
      out.insert(out.end(), v.begin(), v.end());
    }
    return out;
  }

  if (profile_.grammar == Grammar::kKeyValue) {
    std::string body;
    int result = 0;
    if (parsed == nullptr) {
      result = -3;
      body = "<msg>malformed request</msg>";
    } else {
      for (const Field& f : parsed->fields) {
        auto it = profile_.functions.find(f.key);
        if (it == profile_.functions.end()) {
          result = -1;
          absl::StrAppend(&body, "<error>unknown parameter ", f.key, "</error>");
        } else if (Check(it->second, f.value, {f.key}, false)) {
          result = -1;
          absl::StrAppend(&body, "<error>invalid value ", f.value.text, " for ",
                          f.key, "</error>");
        } else {
          state_[f.key] = f.value.text;
          absl::StrAppend(&body, "<", f.key, ">", f.value.text, "</", f.key, ">");
        }
      }
    }
    std::string out = absl::StrCat("<QDocRoot><authPassed>",
                                   parsed ? 1 : 0, "</authPassed><result>",
                                   result, "</result>", body);
    for (const RandomField& r : profile_.randomness) {
      absl::StrAppend(&out, "<", r.name, ">", RandomValue(r), "</", r.name, ">");
    }
    absl::StrAppend(&out, "</QDocRoot>");
    return Bytes(out);
  }

  // JsonLike: one item per command, each missing its final '}' so random
  // fields can be spliced into the first one.
  std::vector<std::string> items;
  if (parsed == nullptr) {
    items.push_back(absl::StrCat("{\"error\":{\"type\":2,\"address\":\"", addr,
                                 "\",\"description\":\"body contains invalid json\"}"));
  } else if (parsed->fields.empty()) {
    items.push_back(absl::StrCat("{\"error\":{\"type\":5,\"address\":\"", addr,
                                 "\",\"description\":\"invalid/missing parameters in body\"}"));
  } else {
    for (const Field& f : parsed->fields) {
      std::optional<Problem> problem;
      auto it = profile_.functions.find(f.key);
      if (it == profile_.functions.end()) {
        problem = Problem{Problem::Kind::kUnknown, {f.key}, f.value.Render()};
      } else {
        problem = Check(it->second, f.value, {f.key}, typed);
      }
      if (!problem) {
        state_[f.key] = f.value.Render();
        items.push_back(absl::StrCat("{\"success\":{\"", addr, "/", f.key,
                                     "\":", f.value.Render(), "}"));
        continue;
      }
      const std::string address =
          absl::StrCat(addr, "/", absl::StrJoin(problem->path, "/"));
      const std::string& last = problem->path.back();
      if (problem->kind == Problem::Kind::kUnknown) {
        items.push_back(absl::StrCat("{\"error\":{\"type\":6,\"address\":\"", address,
                                     "\",\"description\":\"parameter, ", last,
                                     ", not available\"}"));
      } else {
        items.push_back(absl::StrCat("{\"error\":{\"type\":7,\"address\":\"", address,
                                     "\",\"description\":\"invalid value, ",
                                     problem->raw, ", for parameter, ", last, "\"}"));
      }
    }
  }
  for (const RandomField& r : profile_.randomness) {
    absl::StrAppend(&items[0], ",\"", r.name, "\":\"", RandomValue(r), "\"");
  }
  for (std::string& item : items) item += "}";
  if (items.size() == 1) return Bytes(items[0]);
  return Bytes(absl::StrCat("[", absl::StrJoin(items, ","), "]"));
}

void MockDevice::Reset() {
  std::lock_guard<std::mutex> lock(mu_);
  state_ = profile_.initial_state;
  hung_ = false;
  aborted_ = false;
  hang_until_ = {};
  random_counter_ = 0;
  rng_.seed(profile_.rng_seed);
  boot_time_ = Clock::now();
  ++resets_;
}

void MockDevice::SetScript(ResponseScript script) {
  std::lock_guard<std::mutex> lock(mu_);
  script_ = std::move(script);
}

std::optional<std::vector<uint8_t>> MockDevice::GroundTruth(
    const ByteArray& input) const {
  std::optional<ParsedInput> parsed = Parse(profile_.grammar, input);
  if (!parsed) return std::nullopt;
  return parsed->data_mask;
}

std::map<std::string, std::string> MockDevice::state() const {
  std::lock_guard<std::mutex> lock(mu_);
  return state_;
}

std::string MockDevice::StateJson() const {
  std::lock_guard<std::mutex> lock(mu_);
  nlohmann::ordered_json j;
  j["state"] = state_;
  j["hung"] = hung_ || Clock::now() < hang_until_;
  j["aborted"] = aborted_;
  j["received"] = received_;
  j["replied"] = replied_;
  j["resets"] = resets_;
  return j.dump();
}

bool MockDevice::aborted() const {
  std::lock_guard<std::mutex> lock(mu_);
  return aborted_;
}

bool MockDevice::hung() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hung_ || Clock::now() < hang_until_;
}

uint64_t MockDevice::received() const {
  std::lock_guard<std::mutex> lock(mu_);
  return received_;
}

uint64_t MockDevice::resets() const {
  std::lock_guard<std::mutex> lock(mu_);
  return resets_;
}

}  // namespace snipfuzz::mock
