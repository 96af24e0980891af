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

#ifndef SNIPFUZZ_HEX_H_
#define SNIPFUZZ_HEX_H_

#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "snipfuzz/message.h"

namespace snipfuzz {

// Lowercase hex, two characters per byte.
std::string HexEncode(const ByteArray& bytes);

// Accepts only even-length lowercase hex.
absl::StatusOr<ByteArray> HexDecode(std::string_view hex);

// Printable rendering for logs: ASCII stays, everything else becomes \xNN.
std::string EscapeBytes(const ByteArray& bytes);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_HEX_H_
