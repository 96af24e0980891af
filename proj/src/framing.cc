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

#include "snipfuzz/framing.h"

#include <algorithm>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "snipfuzz/errors.h"
#include "snipfuzz/hex.h"

namespace snipfuzz {

namespace {

uint64_t ReadLength(const ByteArray& buf, int width, Endian endian) {
  uint64_t value = 0;
  for (int i = 0; i < width; ++i) {
    const int idx = endian == Endian::kBig ? i : width - 1 - i;
    value = (value << 8) | buf[idx];
  }
  return value;
}

}  // namespace

std::string Framing::ToString() const {
  switch (kind) {
    case Kind::kDelimiter: return absl::StrCat("delim:", HexEncode(delimiter));
    case Kind::kLengthPrefix:
      return absl::StrCat("len:", width, ":",
                          endian == Endian::kBig ? "be" : "le");
    case Kind::kReadUntilTimeout: return "raw";
  }
  return "raw";
}

absl::StatusOr<Framing> Framing::Parse(std::string_view text) {
  std::vector<std::string> parts = absl::StrSplit(std::string(text), ':');
  if (parts.size() == 1 && parts[0] == "raw") return ReadUntilTimeout();
  if (parts.size() == 2 && parts[0] == "delim") {
    absl::StatusOr<ByteArray> delim = HexDecode(parts[1]);
    if (!delim.ok() || delim->empty()) {
      return MakeError(ErrorKind::kInvalidConfig, "framing \"", text,
                       "\": delimiter must be non-empty lowercase hex");
    }
    return Delimiter(*std::move(delim));
  }
  if (parts.size() == 3 && parts[0] == "len") {
    int width = 0;
    if (parts[1] == "1") width = 1;
    else if (parts[1] == "2") width = 2;
    else if (parts[1] == "4") width = 4;
    if (width == 0 || (parts[2] != "be" && parts[2] != "le")) {
      return MakeError(ErrorKind::kInvalidConfig, "framing \"", text,
                       "\": expected len:<1|2|4>:<be|le>");
    }
    return LengthPrefix(width, parts[2] == "be" ? Endian::kBig : Endian::kLittle);
  }
  return MakeError(ErrorKind::kInvalidConfig, "unknown framing \"", text,
                   "\"; expected delim:<hex>, len:<w>:<be|le> or raw");
}

absl::StatusOr<ByteArray> EncodeFrame(const ByteArray& payload,
                                      const Framing& framing) {
  ByteArray out;
  switch (framing.kind) {
    case Framing::Kind::kDelimiter:
      out = payload;
      out.insert(out.end(), framing.delimiter.begin(), framing.delimiter.end());
      return out;
    case Framing::Kind::kLengthPrefix: {
      const uint64_t limit = framing.width >= 8
                                 ? UINT64_MAX
                                 : (uint64_t{1} << (8 * framing.width)) - 1;
      if (payload.size() > limit) {
        return absl::OutOfRangeError(absl::StrCat(
            payload.size(), "-byte payload exceeds a ", framing.width,
            "-byte length prefix"));
      }
      out.resize(framing.width);
      uint64_t n = payload.size();
      for (int i = 0; i < framing.width; ++i) {
        const int idx =
            framing.endian == Endian::kBig ? framing.width - 1 - i : i;
        out[idx] = static_cast<uint8_t>(n & 0xff);
        n >>= 8;
      }
      out.insert(out.end(), payload.begin(), payload.end());
      return out;
    }
    case Framing::Kind::kReadUntilTimeout:
      return payload;
  }
  return payload;
}

std::optional<ByteArray> FrameDecoder::Next() {
  switch (framing_.kind) {
    case Framing::Kind::kDelimiter: {
      auto it = std::search(buffer_.begin(), buffer_.end(),
                            framing_.delimiter.begin(),
                            framing_.delimiter.end());
      if (it == buffer_.end()) return std::nullopt;
      ByteArray frame(buffer_.begin(), it);
      buffer_.erase(buffer_.begin(), it + framing_.delimiter.size());
      return frame;
    }
    case Framing::Kind::kLengthPrefix: {
      const size_t w = static_cast<size_t>(framing_.width);
      if (buffer_.size() < w) return std::nullopt;
      const uint64_t n = ReadLength(buffer_, framing_.width, framing_.endian);
      if (buffer_.size() - w < n) return std::nullopt;
      ByteArray frame(buffer_.begin() + w, buffer_.begin() + w + n);
      buffer_.erase(buffer_.begin(), buffer_.begin() + w + n);
      return frame;
    }
    case Framing::Kind::kReadUntilTimeout:
      return std::nullopt;
  }
  return std::nullopt;
}

ByteArray DecodeDatagram(const ByteArray& datagram, const Framing& framing) {
  switch (framing.kind) {
    case Framing::Kind::kDelimiter: {
      auto it = std::search(datagram.begin(), datagram.end(),
                            framing.delimiter.begin(), framing.delimiter.end());
      return ByteArray(datagram.begin(), it);
    }
    case Framing::Kind::kLengthPrefix: {
      const size_t w = static_cast<size_t>(framing.width);
      if (datagram.size() < w) return {};
      const uint64_t n = ReadLength(datagram, framing.width, framing.endian);
      const size_t take = std::min<uint64_t>(n, datagram.size() - w);
      return ByteArray(datagram.begin() + w, datagram.begin() + w + take);
    }
    case Framing::Kind::kReadUntilTimeout:
      return datagram;
  }
  return datagram;
}

}  // namespace snipfuzz
