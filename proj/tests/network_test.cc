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

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <memory>

#include "gtest/gtest.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/mock_device.h"
#include "snipfuzz/mock_server.h"
#include "snipfuzz/monitor.h"
#include "snipfuzz/transport.h"

namespace snipfuzz {
namespace {

mock::DeviceProfile Load(const std::string& name) {
  absl::StatusOr<mock::DeviceProfile> p = mock::LoadDeviceProfile(
      std::string(SNIPFUZZ_DATA_DIR) + "/profiles/" + name + ".json");
  EXPECT_TRUE(p.ok()) << p.status();
  return p.ok() ? *p : mock::DeviceProfile{};
}

// Minimal blocking line client for the control channel.
std::string Control(uint16_t port, const std::string& line) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(fd);
    return "<connect failed>";
  }
  const std::string out = line + "\n";
  (void)!::write(fd, out.data(), out.size());
  std::string reply;
  char c;
  while (::read(fd, &c, 1) == 1 && c != '\n') reply.push_back(c);
  ::close(fd);
  return reply;
}

class ServerTest : public ::testing::Test {
 protected:
  void StartServer(const std::string& profile) {
    device_ = std::make_shared<mock::MockDevice>(Load(profile));
    server_ = std::make_unique<mock::MockServer>(device_);
    ASSERT_TRUE(server_->Start().ok());
    target_.port = server_->port();
    target_.protocol = device_->profile().protocol;
    target_.framing = device_->profile().framing;
    target_.response_timeout_ms = 150;
    target_.boot_wait_ms = 0;
  }
  void TearDown() override {
    if (server_) server_->Stop();
  }

  std::shared_ptr<mock::MockDevice> device_;
  std::unique_ptr<mock::MockServer> server_;
  TargetConfig target_;
};

TEST_F(ServerTest, TcpRequestReply) {
  StartServer("hue_light");
  NetworkSession session(target_);
  ASSERT_TRUE(session.Open().ok());
  SendOutcome out = session.SendSequence(
      {ToBytes(R"({"on":false})"), ToBytes(R"({"n":true})")});
  ASSERT_TRUE(out.ok()) << out.error;
  ASSERT_EQ(out.responses.size(), 2u);
  EXPECT_EQ(ToString(out.responses[0].bytes),
            R"({"success":{"/lights/1/state/on":false}})");
  EXPECT_NE(ToString(out.responses[1].bytes).find("parameter, n, not available"),
            std::string::npos);
  EXPECT_EQ(session.transmissions(), 1u);
}

TEST_F(ServerTest, UdpRequestReply) {
  StartServer("bulb_custombyte");
  NetworkSession session(target_);
  ASSERT_TRUE(session.Open().ok());
  SendOutcome out = session.SendSequence({ByteArray{0x55, 1, 0x61, 2}});
  ASSERT_TRUE(out.ok()) << out.error;
  ASSERT_EQ(out.responses.size(), 1u);
  EXPECT_EQ(out.responses[0].bytes[0], 0xAA);
}

TEST_F(ServerTest, SilenceIsATimeoutWithTheMessageIndex) {
  StartServer("hue_light");
  EXPECT_EQ(Control(server_->control_port(),
                    R"(SCRIPT {"schedule":["reply","drop"],"then":"reply"})"),
            "OK");
  NetworkSession session(target_);
  ASSERT_TRUE(session.Open().ok());
  SendOutcome out = session.SendSequence(
      {ToBytes(R"({"on":true})"), ToBytes(R"({"on":true})")});
  EXPECT_EQ(out.status, SendOutcome::Status::kTimeout);
  EXPECT_EQ(out.timeout_index, 1u);
  EXPECT_EQ(out.responses.size(), 1u);
}

TEST_F(ServerTest, ControlChannel) {
  StartServer("hue_light");
  NetworkSession session(target_);
  ASSERT_TRUE(session.Open().ok());
  ASSERT_TRUE(session.SendSequence({ToBytes(R"({"bri":7})")}).ok());
  EXPECT_EQ(device_->state().at("bri"), "7");
  const std::string state = Control(server_->control_port(), "STATE?");
  EXPECT_NE(state.find("\"received\":1"), std::string::npos) << state;
  EXPECT_EQ(Control(server_->control_port(), "RESET"), "OK");
  EXPECT_EQ(device_->state().at("bri"), "254");
  EXPECT_EQ(Control(server_->control_port(), "DANCE").rfind("ERR unknown command", 0), 0u);
  EXPECT_EQ(Control(server_->control_port(), "SCRIPT {").substr(0, 3), "ERR");
  // RESET dropped the fuzzing connection; the session reconnects.
  ASSERT_TRUE(session.Reconnect().ok());
  EXPECT_TRUE(session.SendSequence({ToBytes(R"({"on":true})")}).ok());
}

TEST_F(ServerTest, ControlRestarterAndMonitorRecover) {
  StartServer("hue_light_faulty");
  NetworkSession session(target_);
  ASSERT_TRUE(session.Open().ok());
  std::unique_ptr<Restarter> restarter = MakeRestarter("control", target_);
  ASSERT_NE(restarter, nullptr);
  CrashMonitor monitor(session, restarter.get(), MonitorConfig{3, 0});
  const MessageSequence trigger{ToBytes(R"({"schedule":"name":"x"}})")};
  SendOutcome out = monitor.Send(trigger);
  ASSERT_EQ(out.status, SendOutcome::Status::kTimeout);
  DetectionResult d = monitor.DetectCrash(trigger, out.timeout_index);
  EXPECT_EQ(d.verdict, Verdict::kCrash);
  EXPECT_TRUE(IsConformingCrashTimeline(d.timeline));
  EXPECT_EQ(d.resends, 4);
  ASSERT_TRUE(monitor.Recover().ok());
  EXPECT_TRUE(monitor.Send({ToBytes(R"({"on":true})")}).ok());
}

TEST_F(ServerTest, DropOnceIsNoCrash) {
  StartServer("hue_light");
  ASSERT_EQ(Control(server_->control_port(), R"(SCRIPT {"schedule":["drop"]})"), "OK");
  NetworkSession session(target_);
  ASSERT_TRUE(session.Open().ok());
  CrashMonitor monitor(session, nullptr, MonitorConfig{3, 0});
  const MessageSequence seq{ToBytes(R"({"on":true})")};
  SendOutcome out = monitor.Send(seq);
  ASSERT_FALSE(out.ok());
  DetectionResult d = monitor.DetectCrash(seq, out.timeout_index);
  EXPECT_EQ(d.verdict, Verdict::kNoCrash);
  EXPECT_EQ(d.resends, 1);
  ASSERT_EQ(d.responses.size(), 1u);
}

TEST_F(ServerTest, NoRestarterMeansUnconfirmed) {
  StartServer("hue_light");
  ASSERT_EQ(Control(server_->control_port(), R"(SCRIPT {"then":"drop"})"), "OK");
  NetworkSession session(target_);
  ASSERT_TRUE(session.Open().ok());
  CrashMonitor monitor(session, nullptr, MonitorConfig{3, 0});
  const MessageSequence seq{ToBytes(R"({"on":true})")};
  DetectionResult d = monitor.DetectCrash(seq, 0);
  EXPECT_EQ(d.verdict, Verdict::kCrashUnconfirmed);
  EXPECT_FALSE(d.restarted);
}

TEST_F(ServerTest, AbortedDeviceDropsConnections) {
  StartServer("nas_keyvalue");
  NetworkSession session(target_);
  ASSERT_TRUE(session.Open().ok());
  SendOutcome out = session.SendSequence({ToBytes("share=" + std::string(80, 'A'))});
  EXPECT_FALSE(out.ok());
  EXPECT_TRUE(device_->aborted());
  EXPECT_EQ(Control(server_->control_port(), "RESET"), "OK");
  ASSERT_TRUE(session.Reconnect().ok());
  EXPECT_TRUE(session.SendSequence({ToBytes("func=status")}).ok());
}

TEST_F(ServerTest, PortInUse) {
  StartServer("hue_light");
  mock::MockServer second(device_, server_->port());
  EXPECT_TRUE(IsError(second.Start(), ErrorKind::kPortInUse));
}

TEST(NetworkSession, UnreachableTarget) {
  TargetConfig t;
  t.port = 1;
  NetworkSession session(t);
  EXPECT_TRUE(IsError(session.Open(), ErrorKind::kTargetUnreachable));
}

TEST(CommandRestarter, ExitStatus) {
  EXPECT_TRUE(CommandRestarter("true").Restart().ok());
  EXPECT_TRUE(IsError(CommandRestarter("false").Restart(),
                      ErrorKind::kRestartHookFailed));
  TargetConfig t;
  EXPECT_EQ(MakeRestarter(std::nullopt, t), nullptr);
}

}  // namespace
}  // namespace snipfuzz
