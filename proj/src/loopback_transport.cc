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

#include "snipfuzz/loopback_transport.h"

#include <chrono>

namespace snipfuzz::mock {

SendOutcome LoopbackTransport::SendSequence(const MessageSequence& sequence) {
  ++transmissions_;
  std::vector<Response> responses;
  for (size_t i = 0; i < sequence.size(); ++i) {
    if (device_.aborted()) {
      return SendOutcome::ConnectionError("connection closed by peer", i);
    }
    HandleResult r = device_.Handle(sequence[i]);
    if (!r.reply) return SendOutcome::Timeout(i, std::move(responses));
    responses.push_back({*std::move(r.reply), std::chrono::steady_clock::now()});
  }
  return SendOutcome::Responses(std::move(responses));
}

}  // namespace snipfuzz::mock
