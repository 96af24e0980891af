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

#ifndef SNIPFUZZ_MOCK_SERVER_H_
#define SNIPFUZZ_MOCK_SERVER_H_

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <thread>

#include "absl/status/status.h"
#include "snipfuzz/framing.h"
#include "snipfuzz/mock_device.h"

namespace snipfuzz::mock {

// Serves a MockDevice on a fuzzing port (TCP or UDP, per the profile) and a
// line-oriented TCP control channel on the next port up:
//   RESET          -> "OK"
//   STATE?         -> one JSON line
//   SCRIPT <json>  -> "OK" or "ERR <reason>"
// One fuzzing client is served at a time; a new connection replaces the old.
class MockServer {
 public:
  // `port` 0 picks a free pair of adjacent ports.
  MockServer(std::shared_ptr<MockDevice> device, uint16_t port = 0,
             std::string host = "127.0.0.1");
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  // Fails with PortInUse when either port is taken.
  absl::Status Start();
  void Stop();

  uint16_t port() const { return port_; }
  uint16_t control_port() const { return static_cast<uint16_t>(port_ + 1); }
  MockDevice& device() { return *device_; }

 private:
  absl::Status Bind(uint16_t port);
  void Loop();
  void ServeFuzz(int fd);
  bool ServeControl(int fd, std::string& buffer);
  void CloseClient();

  std::shared_ptr<MockDevice> device_;
  std::string host_;
  uint16_t requested_port_;
  uint16_t port_ = 0;
  int fuzz_fd_ = -1;      // listening socket (TCP) or the bound socket (UDP)
  int control_fd_ = -1;
  int client_fd_ = -1;
  std::optional<FrameDecoder> decoder_;
  int wake_[2] = {-1, -1};
  std::thread thread_;
  std::atomic<bool> running_{false};
};

}  // namespace snipfuzz::mock

#endif  // SNIPFUZZ_MOCK_SERVER_H_
