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

#include "snipfuzz/monitor.h"

#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstdlib>
#include <cstring>
#include <thread>

#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/strip.h"
#include "snipfuzz/errors.h"
#include "spdlog/spdlog.h"

namespace snipfuzz {

namespace {

MonitorEvent Event(MonitorEvent::Kind kind, int attempt = 0,
                   std::string detail = {}) {
  return {kind, attempt, std::move(detail), std::chrono::system_clock::now()};
}

// One request line, one reply line, over a fresh TCP connection.
absl::StatusOr<std::string> ControlRequest(const std::string& host,
                                           uint16_t port,
                                           const std::string& line,
                                           int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* result = nullptr;
  const std::string port_text = absl::StrCat(port);
  if (int rc = ::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &result);
      rc != 0) {
    return absl::UnavailableError(::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = result; ai != nullptr && fd < 0; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC,
                  ai->ai_protocol);
    if (fd >= 0 && ::connect(fd, ai->ai_addr, ai->ai_addrlen) != 0) {
      ::close(fd);
      fd = -1;
    }
  }
  ::freeaddrinfo(result);
  if (fd < 0) {
    return absl::UnavailableError(absl::StrCat("control channel ", host, ":",
                                               port, ": ", std::strerror(errno)));
  }
  const std::string request = line + "\n";
  if (::send(fd, request.data(), request.size(), MSG_NOSIGNAL) !=
      static_cast<ssize_t>(request.size())) {
    ::close(fd);
    return absl::UnavailableError("control channel send failed");
  }
  std::string reply;
  char buf[1024];
  while (reply.find('\n') == std::string::npos) {
    pollfd p{fd, POLLIN, 0};
    if (::poll(&p, 1, timeout_ms) <= 0) break;
    ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
    if (n <= 0) break;
    reply.append(buf, static_cast<size_t>(n));
  }
  ::close(fd);
  if (size_t nl = reply.find('\n'); nl != std::string::npos) {
    reply.resize(nl);
    return reply;
  }
  return absl::DeadlineExceededError("control channel gave no reply");
}

}  // namespace

absl::Status CommandRestarter::Restart() {
  const int rc = std::system(command_.c_str());
  if (rc != 0) {
    return MakeError(ErrorKind::kRestartHookFailed, "\"", command_,
                     "\" exited with status ", rc);
  }
  return absl::OkStatus();
}

absl::Status ControlChannelRestarter::Restart() {
  absl::StatusOr<std::string> reply =
      ControlRequest(host_, port_, "RESET", timeout_ms_);
  if (!reply.ok()) {
    return MakeError(ErrorKind::kRestartHookFailed, reply.status().message());
  }
  if (!absl::StartsWith(*reply, "OK")) {
    return MakeError(ErrorKind::kRestartHookFailed, "control channel replied \"",
                     *reply, "\"");
  }
  return absl::OkStatus();
}

std::unique_ptr<Restarter> MakeRestarter(
    const std::optional<std::string>& command, const TargetConfig& target) {
  if (!command || command->empty()) return nullptr;
  if (*command == "control") {
    return std::make_unique<ControlChannelRestarter>(
        target.host, static_cast<uint16_t>(target.port + 1));
  }
  absl::string_view rest = *command;
  if (absl::ConsumePrefix(&rest, "control://")) {
    const size_t colon = rest.rfind(':');
    uint32_t port = 0;
    if (colon != std::string_view::npos &&
        absl::SimpleAtoi(rest.substr(colon + 1), &port) && port < 65536) {
      return std::make_unique<ControlChannelRestarter>(
          std::string(rest.substr(0, colon)), static_cast<uint16_t>(port));
    }
  }
  return std::make_unique<CommandRestarter>(*command);
}

std::string MonitorEventName(MonitorEvent::Kind kind) {
  switch (kind) {
    case MonitorEvent::Kind::kTrigger: return "trigger";
    case MonitorEvent::Kind::kResend: return "resend";
    case MonitorEvent::Kind::kTimeout: return "timeout";
    case MonitorEvent::Kind::kResponse: return "response";
    case MonitorEvent::Kind::kRestart: return "restart";
    case MonitorEvent::Kind::kRestartFailed: return "restart_failed";
    case MonitorEvent::Kind::kConfirmResend: return "confirm_resend";
    case MonitorEvent::Kind::kVerdict: return "verdict";
  }
  return "unknown";
}

std::string VerdictName(Verdict verdict) {
  switch (verdict) {
    case Verdict::kNoCrash: return "no_crash";
    case Verdict::kCrash: return "crash";
    case Verdict::kCrashUnconfirmed: return "crash_unconfirmed";
  }
  return "unknown";
}

bool IsConformingCrashTimeline(const std::vector<MonitorEvent>& timeline) {
  using K = MonitorEvent::Kind;
  const std::vector<K> expected = {
      K::kTrigger, K::kResend,        K::kTimeout, K::kResend,
      K::kTimeout, K::kResend,        K::kTimeout, K::kRestart,
      K::kConfirmResend, K::kTimeout, K::kVerdict};
  if (timeline.size() != expected.size()) return false;
  for (size_t i = 0; i < expected.size(); ++i) {
    if (timeline[i].kind != expected[i]) return false;
  }
  for (int attempt = 1; attempt <= 3; ++attempt) {
    if (timeline[1 + 2 * (attempt - 1)].attempt != attempt) return false;
  }
  return timeline.back().detail == VerdictName(Verdict::kCrash);
}

SendOutcome CrashMonitor::Send(const MessageSequence& sequence) {
  SendOutcome outcome = transport_.SendSequence(sequence);
  if (outcome.status != SendOutcome::Status::kConnectionError) return outcome;
  const size_t index = outcome.timeout_index;
  if (absl::Status st = transport_.Reconnect(); !st.ok()) {
    spdlog::debug("reconnect failed: {}", st.ToString());
    return SendOutcome::Timeout(index);
  }
  ++reconnect_resends_;
  outcome = transport_.SendSequence(sequence);
  if (outcome.status == SendOutcome::Status::kConnectionError) {
    return SendOutcome::Timeout(outcome.timeout_index);
  }
  return outcome;
}

DetectionResult CrashMonitor::DetectCrash(const MessageSequence& sequence,
                                          size_t timeout_index) {
  using K = MonitorEvent::Kind;
  DetectionResult result;
  result.timeline.push_back(Event(
      K::kTrigger, 0, absl::StrCat("timeout after message ", timeout_index)));
  for (int attempt = 1; attempt <= config_.resend_attempts; ++attempt) {
    result.timeline.push_back(Event(K::kResend, attempt));
    ++result.resends;
    SendOutcome outcome = Send(sequence);
    if (outcome.ok()) {
      result.timeline.push_back(Event(K::kResponse, attempt));
      result.timeline.push_back(
          Event(K::kVerdict, 0, VerdictName(Verdict::kNoCrash)));
      result.verdict = Verdict::kNoCrash;
      result.responses = std::move(outcome.responses);
      return result;
    }
    result.timeline.push_back(Event(
        K::kTimeout, attempt,
        absl::StrCat("timeout after message ", outcome.timeout_index)));
  }
  absl::Status restart =
      restarter_ != nullptr
          ? restarter_->Restart()
          : MakeError(ErrorKind::kRestartHookFailed, "no restart hook configured");
  if (!restart.ok()) {
    result.timeline.push_back(
        Event(K::kRestartFailed, 0, std::string(restart.message())));
    result.timeline.push_back(
        Event(K::kVerdict, 0, VerdictName(Verdict::kCrashUnconfirmed)));
    result.verdict = Verdict::kCrashUnconfirmed;
    return result;
  }
  result.restarted = true;
  result.timeline.push_back(Event(K::kRestart));
  if (config_.boot_wait_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(config_.boot_wait_ms));
  }
  (void)transport_.Reconnect();
  result.timeline.push_back(Event(K::kConfirmResend));
  ++result.resends;
  SendOutcome outcome = Send(sequence);
  if (outcome.ok()) {
    result.timeline.push_back(Event(K::kResponse));
    result.timeline.push_back(
        Event(K::kVerdict, 0, VerdictName(Verdict::kNoCrash)));
    result.verdict = Verdict::kNoCrash;
    result.responses = std::move(outcome.responses);
    return result;
  }
  result.timeline.push_back(Event(
      K::kTimeout, 0,
      absl::StrCat("timeout after message ", outcome.timeout_index)));
  result.timeline.push_back(Event(K::kVerdict, 0, VerdictName(Verdict::kCrash)));
  result.verdict = Verdict::kCrash;
  return result;
}

absl::Status CrashMonitor::Recover() {
  if (restarter_ == nullptr) {
    return MakeError(ErrorKind::kRestartHookFailed, "no restart hook configured");
  }
  absl::Status st = restarter_->Restart();
  if (!st.ok()) return st;
  if (config_.boot_wait_ms > 0) {
    std::this_thread::sleep_for(std::chrono::milliseconds(config_.boot_wait_ms));
  }
  return transport_.Reconnect();
}

RestoreOutcome RestoreDevice(CrashMonitor& monitor,
                             const MessageSequence& restoring_sequence) {
  RestoreOutcome out;
  if (restoring_sequence.empty()) return out;
  SendOutcome outcome = monitor.Send(restoring_sequence);
  if (outcome.ok()) return out;
  out.escalation =
      monitor.DetectCrash(restoring_sequence, outcome.timeout_index);
  out.acknowledged = out.escalation->verdict == Verdict::kNoCrash;
  return out;
}

}  // namespace snipfuzz
