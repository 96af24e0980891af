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

#ifndef SNIPFUZZ_FRAMING_H_
#define SNIPFUZZ_FRAMING_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "snipfuzz/message.h"

namespace snipfuzz {

enum class Protocol { kTcp, kUdp };
enum class Endian { kBig, kLittle };

// How payloads are delimited on the wire. Length prefixes do not count
// themselves.
struct Framing {
  enum class Kind { kDelimiter, kLengthPrefix, kReadUntilTimeout };
  Kind kind = Kind::kLengthPrefix;
  ByteArray delimiter;
  int width = 4;
  Endian endian = Endian::kBig;

  static Framing Delimiter(ByteArray delimiter) {
    return {Kind::kDelimiter, std::move(delimiter), 4, Endian::kBig};
  }
  static Framing LengthPrefix(int width, Endian endian) {
    return {Kind::kLengthPrefix, {}, width, endian};
  }
  static Framing ReadUntilTimeout() {
    return {Kind::kReadUntilTimeout, {}, 4, Endian::kBig};
  }

  // Text form used by the CLI and config files:
  //   "delim:<hex>"   e.g. delim:0a
  //   "len:<1|2|4>:<be|le>"
  //   "raw"           read until the device goes quiet
  std::string ToString() const;
  static absl::StatusOr<Framing> Parse(std::string_view text);

  friend bool operator==(const Framing&, const Framing&) = default;
};

absl::StatusOr<ByteArray> EncodeFrame(const ByteArray& payload,
                                      const Framing& framing);

// Incremental decoder for stream transports. kReadUntilTimeout frames are
// delimited by silence and never complete here.
class FrameDecoder {
 public:
  explicit FrameDecoder(Framing framing) : framing_(std::move(framing)) {}

  void Feed(const uint8_t* data, size_t size) {
    buffer_.insert(buffer_.end(), data, data + size);
  }
  std::optional<ByteArray> Next();
  // Bytes received but not yet part of a complete frame.
  const ByteArray& pending() const { return buffer_; }
  void Clear() { buffer_.clear(); }

 private:
  Framing framing_;
  ByteArray buffer_;
};

// Decodes one datagram. Missing delimiters are tolerated; a short length
// prefix yields whatever bytes are present.
ByteArray DecodeDatagram(const ByteArray& datagram, const Framing& framing);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_FRAMING_H_
