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

#ifndef SNIPFUZZ_TRANSPORT_H_
#define SNIPFUZZ_TRANSPORT_H_

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "snipfuzz/framing.h"
#include "snipfuzz/message.h"
#include "snipfuzz/similarity.h"

namespace snipfuzz {

struct TargetConfig {
  std::string host = "127.0.0.1";
  uint16_t port = 0;
  Protocol protocol = Protocol::kTcp;
  Framing framing = Framing::LengthPrefix(4, Endian::kBig);
  int response_timeout_ms = 2000;
  int inter_message_delay_ms = 0;
  // Gap between the two transmissions of a self-similarity pair.
  int probe_repeat_interval_ms = 1000;
  // Wait after a restart before the confirmation resend.
  int boot_wait_ms = 10000;
  // kReadUntilTimeout: a response ends after this much silence.
  int read_idle_ms = 50;

  absl::Status Validate() const;
};

struct SendOutcome {
  enum class Status { kResponses, kTimeout, kConnectionError };
  Status status = Status::kResponses;
  // One response per answered message, in order.
  std::vector<Response> responses;
  // kTimeout: index of the first message left unanswered.
  size_t timeout_index = 0;
  std::string error;

  bool ok() const { return status == Status::kResponses; }
  static SendOutcome Responses(std::vector<Response> r) {
    return {Status::kResponses, std::move(r), 0, {}};
  }
  static SendOutcome Timeout(size_t index, std::vector<Response> partial = {}) {
    return {Status::kTimeout, std::move(partial), index, {}};
  }
  static SendOutcome ConnectionError(std::string error, size_t index = 0) {
    return {Status::kConnectionError, {}, index, std::move(error)};
  }
};

// One session to one target. Calls are strictly serialized by the owner.
class Transport {
 public:
  virtual ~Transport() = default;

  // Sends each message in order and reads one framed response after each.
  virtual SendOutcome SendSequence(const MessageSequence& sequence) = 0;
  virtual absl::Status Reconnect() = 0;

  // Number of SendSequence calls so far.
  uint64_t transmissions() const { return transmissions_; }

 protected:
  uint64_t transmissions_ = 0;
};

// Raw TCP or UDP session to a networked target.
class NetworkSession : public Transport {
 public:
  explicit NetworkSession(TargetConfig config);
  ~NetworkSession() override;
  NetworkSession(const NetworkSession&) = delete;
  NetworkSession& operator=(const NetworkSession&) = delete;

  // Fails with TargetUnreachable when the TCP connect is refused or times
  // out. UDP sessions always open.
  absl::Status Open();
  void Close();
  bool is_open() const { return fd_ >= 0; }

  SendOutcome SendSequence(const MessageSequence& sequence) override;
  absl::Status Reconnect() override;

  const TargetConfig& config() const { return config_; }

 private:
  enum class ReadStatus { kFrame, kTimeout, kClosed, kError };
  ReadStatus ReadResponse(ByteArray& out, std::string& error);
  void DrainStale();

  TargetConfig config_;
  int fd_ = -1;
  FrameDecoder decoder_;
};

}  // namespace snipfuzz

#endif  // SNIPFUZZ_TRANSPORT_H_
