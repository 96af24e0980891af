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

#include <fcntl.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

#include "absl/strings/str_cat.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/transport.h"

namespace snipfuzz {

namespace {

using Clock = std::chrono::steady_clock;

int RemainingMs(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - Clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

}  // namespace

absl::Status TargetConfig::Validate() const {
  if (host.empty()) {
    return MakeError(ErrorKind::kInvalidConfig, "target host is empty");
  }
  if (port == 0) {
    return MakeError(ErrorKind::kInvalidConfig, "target port is 0");
  }
  if (response_timeout_ms < 100) {
    return MakeError(ErrorKind::kInvalidConfig, "response_timeout_ms ",
                     response_timeout_ms, " is below the 100 ms minimum");
  }
  if (inter_message_delay_ms < 0 || probe_repeat_interval_ms < 0 ||
      boot_wait_ms < 0 || read_idle_ms < 1) {
    return MakeError(ErrorKind::kInvalidConfig,
                     "delays must be non-negative and read_idle_ms >= 1");
  }
  if (framing.kind == Framing::Kind::kDelimiter && framing.delimiter.empty()) {
    return MakeError(ErrorKind::kInvalidConfig, "empty frame delimiter");
  }
  return absl::OkStatus();
}

NetworkSession::NetworkSession(TargetConfig config)
    : config_(std::move(config)), decoder_(config_.framing) {}

NetworkSession::~NetworkSession() { Close(); }

void NetworkSession::Close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  decoder_.Clear();
}

absl::Status NetworkSession::Open() {
  Close();
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype =
      config_.protocol == Protocol::kTcp ? SOCK_STREAM : SOCK_DGRAM;
  addrinfo* result = nullptr;
  const std::string port = absl::StrCat(config_.port);
  if (int rc = ::getaddrinfo(config_.host.c_str(), port.c_str(), &hints,
                             &result);
      rc != 0) {
    return MakeError(ErrorKind::kTargetUnreachable, config_.host, ":", port,
                     ": ", ::gai_strerror(rc));
  }
  std::string last_error = "no addresses";
  for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
    int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC,
                      ai->ai_protocol);
    if (fd < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    // Non-blocking connect bounded by the response timeout.
    ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) | O_NONBLOCK);
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS) {
      pollfd p{fd, POLLOUT, 0};
      rc = ::poll(&p, 1, config_.response_timeout_ms);
      if (rc == 1) {
        int err = 0;
        socklen_t len = sizeof(err);
        ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
        if (err != 0) {
          errno = err;
          rc = -1;
        } else {
          rc = 0;
        }
      } else {
        errno = rc == 0 ? ETIMEDOUT : errno;
        rc = -1;
      }
    }
    if (rc == 0) {
      fd_ = fd;
      break;
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  ::freeaddrinfo(result);
  if (fd_ < 0) {
    return MakeError(ErrorKind::kTargetUnreachable, config_.host, ":", port,
                     ": ", last_error);
  }
  return absl::OkStatus();
}

absl::Status NetworkSession::Reconnect() {
  absl::Status st = Open();
  if (!st.ok()) {
    return MakeError(ErrorKind::kConnectionError, "reconnect failed: ",
                     st.message());
  }
  return st;
}

void NetworkSession::DrainStale() {
  uint8_t buf[4096];
  while (fd_ >= 0) {
    ssize_t n = ::recv(fd_, buf, sizeof(buf), MSG_DONTWAIT);
    if (n <= 0) break;
  }
  decoder_.Clear();
}

NetworkSession::ReadStatus NetworkSession::ReadResponse(ByteArray& out,
                                                        std::string& error) {
  const auto deadline =
      Clock::now() + std::chrono::milliseconds(config_.response_timeout_ms);
  const bool until_quiet =
      config_.framing.kind == Framing::Kind::kReadUntilTimeout;
  ByteArray raw;
  bool got_any = false;
  uint8_t buf[65536];
  while (true) {
    if (config_.protocol == Protocol::kTcp && !until_quiet) {
      if (std::optional<ByteArray> frame = decoder_.Next()) {
        out = *std::move(frame);
        return ReadStatus::kFrame;
      }
    }
    int wait = RemainingMs(deadline);
    if (until_quiet && got_any) wait = config_.read_idle_ms;
    if (wait == 0 && !got_any) return ReadStatus::kTimeout;
    pollfd p{fd_, POLLIN, 0};
    int rc = ::poll(&p, 1, wait);
    if (rc < 0) {
      if (errno == EINTR) continue;
      error = std::strerror(errno);
      return ReadStatus::kError;
    }
    if (rc == 0) {
      if (got_any) {
        out = std::move(raw);
        return ReadStatus::kFrame;
      }
      return ReadStatus::kTimeout;
    }
    ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      if (config_.protocol == Protocol::kUdp) {
        // ICMP unreachable surfaces here; for UDP that is just silence.
        continue;
      }
      error = std::strerror(errno);
      return ReadStatus::kError;
    }
    if (n == 0 && config_.protocol == Protocol::kTcp) {
      if (got_any) {
        out = std::move(raw);
        return ReadStatus::kFrame;
      }
      error = "connection closed by peer";
      return ReadStatus::kClosed;
    }
    if (config_.protocol == Protocol::kUdp) {
      out = DecodeDatagram(ByteArray(buf, buf + n), config_.framing);
      return ReadStatus::kFrame;
    }
    if (until_quiet) {
      raw.insert(raw.end(), buf, buf + n);
      got_any = true;
    } else {
      decoder_.Feed(buf, static_cast<size_t>(n));
    }
  }
}

SendOutcome NetworkSession::SendSequence(const MessageSequence& sequence) {
  ++transmissions_;
  if (fd_ < 0) {
    if (config_.protocol == Protocol::kUdp) {
      if (!Open().ok()) return SendOutcome::Timeout(0);
    } else {
      return SendOutcome::ConnectionError("session is not open");
    }
  }
  std::vector<Response> responses;
  for (size_t i = 0; i < sequence.size(); ++i) {
    if (i > 0 && config_.inter_message_delay_ms > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(config_.inter_message_delay_ms));
    }
    DrainStale();
    absl::StatusOr<ByteArray> frame = EncodeFrame(sequence[i], config_.framing);
    if (!frame.ok()) {
      return SendOutcome::ConnectionError(std::string(frame.status().message()),
                                          i);
    }
    size_t sent = 0;
    while (sent < frame->size()) {
      ssize_t n = ::send(fd_, frame->data() + sent, frame->size() - sent,
                         MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        if (errno == EAGAIN) {
          pollfd p{fd_, POLLOUT, 0};
          if (::poll(&p, 1, config_.response_timeout_ms) <= 0) {
            return SendOutcome::Timeout(i, std::move(responses));
          }
          continue;
        }
        if (config_.protocol == Protocol::kUdp) {
          return SendOutcome::Timeout(i, std::move(responses));
        }
        return SendOutcome::ConnectionError(
            absl::StrCat("send: ", std::strerror(errno)), i);
      }
      sent += static_cast<size_t>(n);
    }
    ByteArray payload;
    std::string error;
    switch (ReadResponse(payload, error)) {
      case ReadStatus::kFrame:
        responses.push_back({std::move(payload), Clock::now()});
        break;
      case ReadStatus::kTimeout:
        return SendOutcome::Timeout(i, std::move(responses));
      case ReadStatus::kClosed:
      case ReadStatus::kError:
        return SendOutcome::ConnectionError(error, i);
    }
  }
  return SendOutcome::Responses(std::move(responses));
}

}  // namespace snipfuzz
