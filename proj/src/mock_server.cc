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

#include "snipfuzz/mock_server.h"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <utility>
#include <vector>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/strip.h"
#include "snipfuzz/errors.h"
#include "spdlog/spdlog.h"

namespace snipfuzz::mock {

namespace {

void SendAll(int fd, const void* data, size_t size) {
  const auto* p = static_cast<const uint8_t*>(data);
  while (size > 0) {
    ssize_t n = ::send(fd, p, size, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return;
    p += n;
    size -= static_cast<size_t>(n);
  }
}

int OpenSocket(const std::string& host, uint16_t port, int type, int& err) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    err = EINVAL;
    return -1;
  }
  int fd = ::socket(AF_INET, type | SOCK_CLOEXEC, 0);
  if (fd < 0) {
    err = errno;
    return -1;
  }
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 ||
      (type == SOCK_STREAM && ::listen(fd, 8) != 0)) {
    err = errno;
    ::close(fd);
    return -1;
  }
  return fd;
}

uint16_t BoundPort(int fd) {
  sockaddr_in addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  return ntohs(addr.sin_port);
}

}  // namespace

MockServer::MockServer(std::shared_ptr<MockDevice> device, uint16_t port,
                       std::string host)
    : device_(std::move(device)), host_(std::move(host)), requested_port_(port) {}

MockServer::~MockServer() { Stop(); }

absl::Status MockServer::Bind(uint16_t port) {
  const bool udp = device_->profile().protocol == Protocol::kUdp;
  int err = 0;
  fuzz_fd_ = OpenSocket(host_, port, udp ? SOCK_DGRAM : SOCK_STREAM, err);
  if (fuzz_fd_ < 0) {
    if (err == EADDRINUSE) {
      return MakeError(ErrorKind::kPortInUse, "port ", port, " is in use");
    }
    return absl::InternalError(absl::StrCat("bind ", port, ": ", std::strerror(err)));
  }
  port_ = BoundPort(fuzz_fd_);
  if (port_ == 65535) {
    ::close(fuzz_fd_);
    fuzz_fd_ = -1;
    return MakeError(ErrorKind::kPortInUse, "no room for the control port");
  }
  control_fd_ = OpenSocket(host_, control_port(), SOCK_STREAM, err);
  if (control_fd_ < 0) {
    ::close(fuzz_fd_);
    fuzz_fd_ = -1;
    if (err == EADDRINUSE) {
      return MakeError(ErrorKind::kPortInUse, "control port ", control_port(),
                       " is in use");
    }
    return absl::InternalError(
        absl::StrCat("bind ", control_port(), ": ", std::strerror(err)));
  }
  return absl::OkStatus();
}

absl::Status MockServer::Start() {
  if (running_) return absl::OkStatus();
  absl::Status st = Bind(requested_port_);
  // An ephemeral pick may collide on port + 1; try a few more.
  for (int attempt = 0; !st.ok() && requested_port_ == 0 && attempt < 32;
       ++attempt) {
    st = Bind(0);
  }
  if (!st.ok()) return st;
  if (::pipe2(wake_, O_CLOEXEC) != 0) {
    return absl::InternalError(absl::StrCat("pipe: ", std::strerror(errno)));
  }
  running_ = true;
  thread_ = std::thread([this] { Loop(); });
  return absl::OkStatus();
}

void MockServer::Stop() {
  if (!running_) return;
  running_ = false;
  const char c = 'x';
  (void)!::write(wake_[1], &c, 1);
  thread_.join();
  CloseClient();
  for (int* fd : {&fuzz_fd_, &control_fd_, &wake_[0], &wake_[1]}) {
    if (*fd >= 0) ::close(*fd);
    *fd = -1;
  }
}

void MockServer::CloseClient() {
  if (client_fd_ >= 0) ::close(client_fd_);
  client_fd_ = -1;
}

void MockServer::ServeFuzz(int fd) {
  const Framing& framing = device_->profile().framing;
  uint8_t buf[65536];
  if (device_->profile().protocol == Protocol::kUdp) {
    sockaddr_storage peer{};
    socklen_t peer_len = sizeof(peer);
    ssize_t n = ::recvfrom(fd, buf, sizeof(buf), 0,
                           reinterpret_cast<sockaddr*>(&peer), &peer_len);
    if (n < 0) return;
    HandleResult r =
        device_->Handle(DecodeDatagram(ByteArray(buf, buf + n), framing));
    if (!r.reply) return;
    absl::StatusOr<ByteArray> frame = EncodeFrame(*r.reply, framing);
    if (frame.ok()) {
      ::sendto(fd, frame->data(), frame->size(), 0,
               reinterpret_cast<sockaddr*>(&peer), peer_len);
    }
    return;
  }
  ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
  if (n <= 0) {
    CloseClient();
    return;
  }
  std::vector<ByteArray> messages;
  if (framing.kind == Framing::Kind::kReadUntilTimeout) {
    messages.emplace_back(buf, buf + n);
  } else {
    decoder_->Feed(buf, static_cast<size_t>(n));
    while (std::optional<ByteArray> m = decoder_->Next()) {
      messages.push_back(*std::move(m));
    }
  }
  for (const ByteArray& m : messages) {
    HandleResult r = device_->Handle(m);
    if (device_->aborted()) {
      CloseClient();
      return;
    }
    if (!r.reply) continue;
    absl::StatusOr<ByteArray> frame = EncodeFrame(*r.reply, framing);
    if (frame.ok()) SendAll(fd, frame->data(), frame->size());
  }
}

// Returns false when the connection should be closed.
bool MockServer::ServeControl(int fd, std::string& buffer) {
  char buf[4096];
  ssize_t n = ::recv(fd, buf, sizeof(buf), 0);
  if (n <= 0) return false;
  buffer.append(buf, static_cast<size_t>(n));
  size_t nl;
  while ((nl = buffer.find('\n')) != std::string::npos) {
    absl::string_view line(buffer.data(), nl);
    absl::ConsumeSuffix(&line, "\r");
    std::string reply;
    if (line == "RESET") {
      device_->Reset();
      // A rebooted device drops its sessions.
      CloseClient();
      reply = "OK";
    } else if (line == "STATE?") {
      reply = device_->StateJson();
    } else if (absl::ConsumePrefix(&line, "SCRIPT ")) {
      absl::StatusOr<ResponseScript> script = ParseResponseScript(std::string_view(line.data(), line.size()));
      if (script.ok()) {
        device_->SetScript(*std::move(script));
        reply = "OK";
      } else {
        reply = absl::StrCat("ERR ", script.status().message());
      }
    } else {
      reply = absl::StrCat("ERR unknown command \"", line, "\"");
    }
    reply += "\n";
    SendAll(fd, reply.data(), reply.size());
    buffer.erase(0, nl + 1);
  }
  return true;
}

void MockServer::Loop() {
  const bool udp = device_->profile().protocol == Protocol::kUdp;
  std::vector<std::pair<int, std::string>> controls;
  while (running_) {
    std::vector<pollfd> fds = {{wake_[0], POLLIN, 0},
                               {fuzz_fd_, POLLIN, 0},
                               {control_fd_, POLLIN, 0}};
    const size_t client_slot = fds.size();
    if (client_fd_ >= 0) fds.push_back({client_fd_, POLLIN, 0});
    const size_t control_base = fds.size();
    for (const auto& [fd, unused] : controls) fds.push_back({fd, POLLIN, 0});

    // Poll with a short timeout so a pending timed hang can expire without
    // any traffic.
    int rc = ::poll(fds.data(), fds.size(), 100);
    if (rc < 0) {
      if (errno == EINTR) continue;
      spdlog::error("mock server poll: {}", std::strerror(errno));
      return;
    }
    if (fds[0].revents) break;

    if (fds[1].revents & POLLIN) {
      if (udp) {
        ServeFuzz(fuzz_fd_);
      } else {
        int fd = ::accept4(fuzz_fd_, nullptr, nullptr, SOCK_CLOEXEC);
        if (fd >= 0) {
          if (device_->aborted()) {
            ::close(fd);
          } else {
            CloseClient();
            client_fd_ = fd;
            decoder_.emplace(device_->profile().framing);
          }
        }
      }
    }
    if (fds[2].revents & POLLIN) {
      int fd = ::accept4(control_fd_, nullptr, nullptr, SOCK_CLOEXEC);
      if (fd >= 0) controls.emplace_back(fd, std::string());
    }
    if (client_slot < control_base &&
        (fds[client_slot].revents & (POLLIN | POLLHUP | POLLERR)) &&
        client_fd_ == fds[client_slot].fd) {
      ServeFuzz(client_fd_);
    }
    std::vector<std::pair<int, std::string>> alive;
    for (size_t i = 0; i < controls.size(); ++i) {
      auto& [fd, buffer] = controls[i];
      const short ev = fds[control_base + i].revents;
      if (ev & (POLLIN | POLLHUP | POLLERR)) {
        if (!ServeControl(fd, buffer)) {
          ::close(fd);
          continue;
        }
      }
      alive.emplace_back(fd, std::move(buffer));
    }
    controls = std::move(alive);
  }
  for (auto& [fd, unused] : controls) ::close(fd);
}

}  // namespace snipfuzz::mock
