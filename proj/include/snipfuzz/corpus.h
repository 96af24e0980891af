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

#ifndef SNIPFUZZ_CORPUS_H_
#define SNIPFUZZ_CORPUS_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "snipfuzz/message.h"

namespace snipfuzz {

// Corpus file layout (JSON):
//
//   { "seeds": [ { "id": "s0", "messages": ["7b22...", ...] }, ... ],
//     "restoring": ["7b22...", ...],
//     "restart_command": "..." | null }
//
// Messages are even-length lowercase hex. Unknown keys are rejected. Seeds
// written back by a campaign may also carry
// "origin": {"parent": id, "message_index": n, "category": c}.
absl::StatusOr<SeedCorpus> ParseSeedCorpus(std::string_view text);
absl::StatusOr<SeedCorpus> LoadSeedCorpus(const std::filesystem::path& path);

// Canonical encoding: fixed key order, two-space indent, trailing newline.
std::string SerializeSeedCorpus(const SeedCorpus& corpus);

}  // namespace snipfuzz

#endif  // SNIPFUZZ_CORPUS_H_
