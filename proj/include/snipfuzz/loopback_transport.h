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

#ifndef SNIPFUZZ_LOOPBACK_TRANSPORT_H_
#define SNIPFUZZ_LOOPBACK_TRANSPORT_H_

#include "snipfuzz/mock_device.h"
#include "snipfuzz/monitor.h"
#include "snipfuzz/transport.h"

namespace snipfuzz::mock {

// Calls a MockDevice in-process. Silence is reported as an immediate timeout,
// and an aborted device looks like a dropped connection. Lets long campaigns
// run without real sockets or response-timeout waits.
class LoopbackTransport : public Transport {
 public:
  explicit LoopbackTransport(MockDevice& device) : device_(device) {}

  SendOutcome SendSequence(const MessageSequence& sequence) override;
  absl::Status Reconnect() override { return absl::OkStatus(); }

 private:
  MockDevice& device_;
};

// Restart hook that resets the in-process device.
class DeviceResetRestarter : public Restarter {
 public:
  explicit DeviceResetRestarter(MockDevice& device) : device_(device) {}
  absl::Status Restart() override {
    device_.Reset();
    return absl::OkStatus();
  }

 private:
  MockDevice& device_;
};

}  // namespace snipfuzz::mock

#endif  // SNIPFUZZ_LOOPBACK_TRANSPORT_H_
