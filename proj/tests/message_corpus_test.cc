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

#include <random>

#include "gtest/gtest.h"
#include "snipfuzz/config.h"
#include "snipfuzz/corpus.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/framing.h"
#include "snipfuzz/hex.h"
#include "snipfuzz/message.h"

namespace snipfuzz {
namespace {

TEST(Hex, RoundTrip) {
  std::mt19937_64 rng(1);
  for (int n = 0; n < 100; ++n) {
    ByteArray b(rng() % 50);
    for (uint8_t& c : b) c = static_cast<uint8_t>(rng());
    absl::StatusOr<ByteArray> back = HexDecode(HexEncode(b));
    ASSERT_TRUE(back.ok());
    EXPECT_EQ(*back, b);
  }
  EXPECT_EQ(HexEncode(ToBytes("{}")), "7b7d");
  EXPECT_FALSE(HexDecode("7b7").ok());
  EXPECT_FALSE(HexDecode("zz").ok());
}

TEST(Partition, Validation) {
  const Message m = ToBytes("abcdef");
  absl::StatusOr<SnippetSet> set = ApplyPartition(m, {2, 4}, {1, 2, 1});
  ASSERT_TRUE(set.ok());
  EXPECT_EQ(set->Boundaries(), (std::vector<size_t>{2, 4}));
  EXPECT_EQ(set->Categories(), (std::vector<CategoryId>{1, 2, 1}));
  EXPECT_TRUE(ValidatePartition(*set, 6).ok());
  EXPECT_FALSE(ValidatePartition(*set, 7).ok());
  EXPECT_TRUE(ApplyPartition(m, {2, 6}, {1, 2}).ok());
  EXPECT_FALSE(ApplyPartition(m, {4, 2}, {1, 2, 3}).ok());
  EXPECT_FALSE(ApplyPartition(m, {2}, {1}).ok());

  SnippetSet gap;
  gap.snippets = {{0, 2, 0}, {3, 6, 0}};
  EXPECT_TRUE(IsError(ValidatePartition(gap, 6), ErrorKind::kInvalidPartition));
}

const char kCorpus[] = R"({
  "seeds": [ { "id": "s0", "messages": ["7b7d", "6869"] },
             { "id": "s1", "messages": ["00"] } ],
  "restoring": ["7b7d"],
  "restart_command": "control"
})";

TEST(Corpus, ParseAndSerializeRoundTrip) {
  absl::StatusOr<SeedCorpus> c = ParseSeedCorpus(kCorpus);
  ASSERT_TRUE(c.ok()) << c.status();
  ASSERT_EQ(c->seeds.size(), 2u);
  EXPECT_EQ(c->seeds[0].sequence[1], ToBytes("hi"));
  EXPECT_EQ(c->restoring_sequence.size(), 1u);
  EXPECT_EQ(c->restart_command, std::optional<std::string>("control"));
  const std::string text = SerializeSeedCorpus(*c);
  absl::StatusOr<SeedCorpus> again = ParseSeedCorpus(text);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(SerializeSeedCorpus(*again), text);
}

TEST(Corpus, Errors) {
  auto kind = [](std::string_view text) {
    return ParseSeedCorpus(text).status();
  };
  EXPECT_TRUE(IsError(kind("{"), ErrorKind::kMalformedCorpus));
  EXPECT_TRUE(IsError(kind(R"({"seeds": []})"), ErrorKind::kMalformedCorpus));
  EXPECT_TRUE(IsError(kind(R"({"seeds": [{"id":"a","messages":[]}]})"),
                      ErrorKind::kMalformedCorpus));
  EXPECT_TRUE(IsError(kind(R"({"seeds": [{"id":"a","messages":["7"]}]})"),
                      ErrorKind::kMalformedCorpus));
  EXPECT_TRUE(IsError(kind(R"({"seeds": [{"id":"a","messages":["00"]}], "x": 1})"),
                      ErrorKind::kMalformedCorpus));
  EXPECT_TRUE(IsError(
      kind(R"({"seeds": [{"id":"a","messages":["00"]},{"id":"a","messages":["00"]}]})"),
      ErrorKind::kMalformedCorpus));
  // Syntax errors carry a position.
  EXPECT_NE(std::string(kind("{\n  \"seeds\": [,]}").message()).find("line 2"),
            std::string::npos);
}

TEST(Framing, ParseAndEncode) {
  absl::StatusOr<Framing> len = Framing::Parse("len:2:le");
  ASSERT_TRUE(len.ok());
  EXPECT_EQ(*len, Framing::LengthPrefix(2, Endian::kLittle));
  EXPECT_EQ(len->ToString(), "len:2:le");
  absl::StatusOr<ByteArray> frame = EncodeFrame(ToBytes("abc"), *len);
  ASSERT_TRUE(frame.ok());
  EXPECT_EQ(*frame, (ByteArray{3, 0, 'a', 'b', 'c'}));

  absl::StatusOr<Framing> delim = Framing::Parse("delim:0d0a");
  ASSERT_TRUE(delim.ok());
  EXPECT_EQ(*EncodeFrame(ToBytes("x"), *delim), ToBytes("x\r\n"));
  EXPECT_EQ(Framing::Parse("raw")->kind, Framing::Kind::kReadUntilTimeout);
  EXPECT_FALSE(Framing::Parse("len:3:be").ok());
  EXPECT_FALSE(Framing::Parse("delim:").ok());
  EXPECT_FALSE(Framing::Parse("bogus").ok());
  EXPECT_FALSE(EncodeFrame(ByteArray(300), Framing::LengthPrefix(1, Endian::kBig)).ok());
}

TEST(FrameDecoder, ReassemblesSplitFrames) {
  FrameDecoder decoder(Framing::LengthPrefix(4, Endian::kBig));
  const ByteArray wire{0, 0, 0, 2, 'h', 'i', 0, 0, 0, 1, '!'};
  std::vector<ByteArray> frames;
  for (uint8_t b : wire) {
    decoder.Feed(&b, 1);
    while (std::optional<ByteArray> f = decoder.Next()) frames.push_back(*f);
  }
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0], ToBytes("hi"));
  EXPECT_EQ(frames[1], ToBytes("!"));

  FrameDecoder lines(Framing::Delimiter(ToBytes("\n")));
  const ByteArray text = ToBytes("a\nbc\n");
  lines.Feed(text.data(), text.size());
  EXPECT_EQ(lines.Next(), std::optional<ByteArray>(ToBytes("a")));
  EXPECT_EQ(lines.Next(), std::optional<ByteArray>(ToBytes("bc")));
  EXPECT_EQ(lines.Next(), std::nullopt);
}

TEST(Config, JsonRoundTrip) {
  CampaignConfig c;
  c.target.host = "10.0.0.2";
  c.target.port = 8080;
  c.target.protocol = Protocol::kUdp;
  c.target.framing = Framing::Delimiter(ToBytes("\n"));
  c.corpus_path = "seeds.json";
  c.mode = Mode::kNoSnippet;
  c.time_budget_s = 12.5;
  c.exec_budget = 777;
  c.rng_seed = 0xfeedface12345678ULL;
  c.mutation.dictionary = {ToBytes("A"), ByteArray{0, 255}};
  c.mutation.boundaries = {-5, 9};
  c.mutation.byte_flip = ByteFlipMode::kHighBit;
  c.mutation.havoc_budget = 3;
  absl::StatusOr<CampaignConfig> back = ConfigFromJson(ConfigToJson(c));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(ConfigToJson(*back).dump(), ConfigToJson(c).dump());
  EXPECT_EQ(back->rng_seed, c.rng_seed);
  EXPECT_EQ(back->mutation.dictionary, c.mutation.dictionary);
  EXPECT_EQ(back->target.framing, c.target.framing);
  EXPECT_EQ(back->exec_budget, c.exec_budget);
}

TEST(Config, RngSeedIsMandatory) {
  nlohmann::ordered_json j = ConfigToJson(CampaignConfig{});
  j.erase("rng_seed");
  EXPECT_TRUE(IsError(ConfigFromJson(j).status(), ErrorKind::kInvalidConfig));
}

TEST(Config, Validation) {
  CampaignConfig c;
  c.target.port = 1;
  EXPECT_TRUE(c.Validate().ok());
  c.target.response_timeout_ms = 50;
  EXPECT_FALSE(c.Validate().ok());
  TargetConfig t;
  EXPECT_TRUE(ParseTargetAddress("example.org:80", t).ok());
  EXPECT_EQ(t.host, "example.org");
  EXPECT_EQ(t.port, 80);
  EXPECT_FALSE(ParseTargetAddress("nohost", t).ok());
  EXPECT_FALSE(ParseTargetAddress("h:70000", t).ok());
}

}  // namespace
}  // namespace snipfuzz
