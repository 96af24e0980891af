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

#ifndef SNIPFUZZ_MOCK_DEVICE_H_
#define SNIPFUZZ_MOCK_DEVICE_H_

// Mock IoT device for lab testing. A device is built from a DeviceProfile and
// mirrors the usual firmware pipeline: a sanitizer parses the input per the
// profile grammar, a function switch dispatches each command key to its
// handler, handlers validate and apply values, and a replier renders the
// answer. Injected faults override the reply with hangs, aborts or garbage.

#include <chrono>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "snipfuzz/framing.h"
#include "snipfuzz/message.h"

namespace snipfuzz::mock {

enum class Grammar { kJsonLike, kKeyValue, kCustomByte };

// Parsed input value. Scalars keep their raw text so replies can echo input
// verbatim.
struct Value {
  enum class Type { kNull, kBool, kNumber, kString, kObject, kArray, kBytes };
  Type type = Type::kNull;
  std::string text;
  std::vector<std::pair<std::string, Value>> members;
  std::vector<Value> items;
  // Produced by the sanitizer's tolerance for a missing opening brace.
  bool lenient = false;

  std::string Render() const;
  const Value* Member(const std::string& key) const;
};

std::string TypeName(Value::Type type);

struct Field {
  std::string key;
  Value value;
};

struct ParsedInput {
  std::vector<Field> fields;
  // One label per input byte: 1 inside keys and scalar values, 0 elsewhere.
  std::vector<uint8_t> data_mask;
};

// Handler spec for one command key (or one nested member).
struct FieldSpec {
  enum class Type { kBool, kInt, kNumber, kEnum, kString, kObject, kArray, kBytes };
  Type type = Type::kString;
  int64_t min = INT64_MIN;
  int64_t max = INT64_MAX;
  std::vector<std::string> values;             // kEnum; kBytes: allowed bytes
  std::map<std::string, FieldSpec> fields;     // kObject
  std::shared_ptr<FieldSpec> item;             // kArray
  std::optional<size_t> length;                // kArray items / kBytes bytes
  std::optional<size_t> max_length;            // kString
};

struct FaultSpec {
  struct Trigger {
    enum class Kind { kTypeMismatch, kEmptyValue, kOversized };
    Kind kind = Kind::kTypeMismatch;
    // Dotted path from the command key, e.g. "schedule.edit_rule".
    std::string path;
    std::string expected;  // kTypeMismatch: declared type name
    std::string found;     // kTypeMismatch: observed type name
    size_t max_length = 0; // kOversized
  };
  struct Behavior {
    enum class Kind { kSilentHang, kProcessAbort, kCorruptReply };
    Kind kind = Kind::kSilentHang;
    // kSilentHang: nullopt hangs until reset.
    std::optional<int> duration_ms;
  };
  Trigger trigger;
  Behavior behavior;
};

struct RandomField {
  enum class Kind { kTimestamp, kToken };
  std::string name;
  Kind kind = Kind::kToken;
  size_t length = 8;
};

struct DeviceProfile {
  std::string name = "device";
  Grammar grammar = Grammar::kJsonLike;
  // JsonLike replies address parameters below this path.
  std::string address = "/lights/1/state";
  std::map<std::string, FieldSpec> functions;
  std::map<std::string, std::string> initial_state;
  std::vector<FaultSpec> faults;
  std::vector<RandomField> randomness;
  uint64_t rng_seed = 1;
  Framing framing = Framing::LengthPrefix(4, Endian::kBig);
  Protocol protocol = Protocol::kTcp;
  uint16_t port = 0;
};

absl::StatusOr<DeviceProfile> ParseDeviceProfile(std::string_view json_text);
absl::StatusOr<DeviceProfile> LoadDeviceProfile(
    const std::filesystem::path& path);
// Checks that fault paths resolve to declared handlers and random fields are
// well formed.
absl::Status ValidateProfile(const DeviceProfile& profile);

// Sanitizers. nullopt means the input is malformed for the grammar.
std::optional<ParsedInput> ParseJsonLike(const ByteArray& input);
std::optional<ParsedInput> ParseKeyValue(const ByteArray& input);
std::optional<ParsedInput> ParseCustomByte(const ByteArray& input);
std::optional<ParsedInput> Parse(Grammar grammar, const ByteArray& input);

// Control-channel script for the fuzzing port. Each incoming message consumes
// one entry of `schedule`; once it is empty `then` applies.
struct ResponseScript {
  enum class Action { kReply, kDrop };
  std::deque<Action> schedule;
  Action then = Action::kReply;
};

absl::StatusOr<ResponseScript> ParseResponseScript(std::string_view json_text);

struct HandleResult {
  // nullopt: the device stays silent.
  std::optional<ByteArray> reply;
  bool fault_fired = false;
};

class MockDevice {
 public:
  explicit MockDevice(DeviceProfile profile);

  HandleResult Handle(const ByteArray& input);

  // Back to the boot state: initial parameter values, no hang, no abort.
  // Scripts survive resets.
  void Reset();
  void SetScript(ResponseScript script);

  // Per-byte data/non-data labels for an accepted input.
  std::optional<std::vector<uint8_t>> GroundTruth(const ByteArray& input) const;

  std::map<std::string, std::string> state() const;
  // JSON line served by the control channel's STATE? command.
  std::string StateJson() const;
  bool aborted() const;
  bool hung() const;
  uint64_t received() const;
  uint64_t resets() const;

  const DeviceProfile& profile() const { return profile_; }

 private:
  HandleResult HandleLocked(const ByteArray& input);
  ByteArray Render(const ParsedInput* parsed);
  std::optional<FaultSpec::Behavior> MatchFault(const ParsedInput& parsed) const;
  std::string RandomValue(const RandomField& field);

  DeviceProfile profile_;
  mutable std::mutex mu_;
  std::map<std::string, std::string> state_;
  ResponseScript script_;
  bool hung_ = false;
  bool aborted_ = false;
  std::chrono::steady_clock::time_point hang_until_{};
  uint64_t received_ = 0;
  uint64_t replied_ = 0;
  uint64_t resets_ = 0;
  uint64_t random_counter_ = 0;
  std::mt19937_64 rng_;
  std::chrono::steady_clock::time_point boot_time_;
};

}  // namespace snipfuzz::mock

#endif  // SNIPFUZZ_MOCK_DEVICE_H_
