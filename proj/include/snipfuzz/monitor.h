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

#ifndef SNIPFUZZ_MONITOR_H_
#define SNIPFUZZ_MONITOR_H_

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "snipfuzz/message.h"
#include "snipfuzz/mutation.h"
#include "snipfuzz/transport.h"

namespace snipfuzz {

// Power-cycles (or otherwise resets) the target.
class Restarter {
 public:
  virtual ~Restarter() = default;
  virtual absl::Status Restart() = 0;
};

// Runs an external command; a non-zero exit status is a failure.
class CommandRestarter : public Restarter {
 public:
  explicit CommandRestarter(std::string command) : command_(std::move(command)) {}
  absl::Status Restart() override;

 private:
  std::string command_;
};

// Sends "RESET" over a line-oriented TCP control channel and expects "OK".
class ControlChannelRestarter : public Restarter {
 public:
  ControlChannelRestarter(std::string host, uint16_t port, int timeout_ms = 2000)
      : host_(std::move(host)), port_(port), timeout_ms_(timeout_ms) {}
  absl::Status Restart() override;

 private:
  std::string host_;
  uint16_t port_;
  int timeout_ms_;
};

// Builds the restart hook named by a corpus `restart_command`:
//   "control"               -> control channel at target host, port + 1
//   "control://host:port"   -> control channel at host:port
//   anything else           -> shell command
// Returns nullptr when no command is configured.
std::unique_ptr<Restarter> MakeRestarter(
    const std::optional<std::string>& command, const TargetConfig& target);

struct MonitorEvent {
  enum class Kind {
    kTrigger,        // the original transmission timed out
    kResend,         // resend attempt `attempt` (1..3)
    kTimeout,        // the preceding transmission went unanswered
    kResponse,       // the preceding transmission was fully answered
    kRestart,        // restart hook invoked successfully
    kRestartFailed,  // restart hook failed
    kConfirmResend,  // resend after restart
    kVerdict,
  };
  Kind kind = Kind::kTrigger;
  int attempt = 0;
  std::string detail;
  std::chrono::system_clock::time_point wall_clock{};
};

std::string MonitorEventName(MonitorEvent::Kind kind);

enum class Verdict { kNoCrash, kCrash, kCrashUnconfirmed };
std::string VerdictName(Verdict verdict);

struct CrashRecord {
  MessageSequence sequence;
  std::optional<MutationPlan> plan;
  SeedId seed;
  size_t message_index = 0;
  // Execution number of the test that triggered the protocol.
  uint64_t exec = 0;
  // True when the timeout hit the restoring sequence that followed the test.
  bool during_restore = false;
  Verdict verdict = Verdict::kCrash;
  std::vector<MonitorEvent> timeline;
};

// True when `timeline` is exactly: trigger, three (resend, timeout) pairs,
// restart, confirmation resend, timeout, crash verdict.
bool IsConformingCrashTimeline(const std::vector<MonitorEvent>& timeline);

struct MonitorConfig {
  int resend_attempts = 3;
  int boot_wait_ms = 10000;
};

struct DetectionResult {
  Verdict verdict = Verdict::kNoCrash;
  std::vector<MonitorEvent> timeline;
  // Responses from the transmission that finally succeeded (kNoCrash).
  std::vector<Response> responses;
  // Transmissions of the sequence made by the protocol (resends + confirm).
  int resends = 0;
  bool restarted = false;
};

// Crash-confirmation protocol run after a timeout: up to three resends, then
// restart, boot wait, and one confirmation resend.
class CrashMonitor {
 public:
  CrashMonitor(Transport& transport, Restarter* restarter, MonitorConfig config)
      : transport_(transport), restarter_(restarter), config_(config) {}

  DetectionResult DetectCrash(const MessageSequence& sequence,
                              size_t timeout_index);

  // Sends with one reconnect-and-retry on connection errors. A connection
  // that cannot be re-established is reported as a timeout.
  SendOutcome Send(const MessageSequence& sequence);

  // Restart used to bring a crashed target back for further testing.
  absl::Status Recover();

  uint64_t reconnect_resends() const { return reconnect_resends_; }

 private:
  Transport& transport_;
  Restarter* restarter_;
  MonitorConfig config_;
  uint64_t reconnect_resends_ = 0;
};

struct RestoreOutcome {
  bool acknowledged = true;
  // Set when the restoring sequence timed out; the caller attributes the
  // result to the test sequence that preceded the restore.
  std::optional<DetectionResult> escalation;
};

// Sends the restoring sequence; responses are discarded. A timeout escalates
// to DetectCrash on the restoring sequence itself.
RestoreOutcome RestoreDevice(CrashMonitor& monitor,
                             const MessageSequence& restoring_sequence);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_MONITOR_H_
