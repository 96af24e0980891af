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

#include "snipfuzz/corpus.h"

#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "snipfuzz/errors.h"
#include "snipfuzz/hex.h"

namespace snipfuzz {

namespace {

using Json = nlohmann::ordered_json;

// Maps a byte offset in `text` to "line L, column C" (1-based).
std::string Position(std::string_view text, size_t byte) {
  size_t line = 1, column = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return absl::StrCat("line ", line, ", column ", column);
}

absl::StatusOr<MessageSequence> DecodeMessages(const Json& node,
                                               const std::string& field,
                                               bool allow_empty) {
  if (!node.is_array()) {
    return MakeError(ErrorKind::kMalformedCorpus, field,
                     ": expected an array of hex strings");
  }
  if (node.empty() && !allow_empty) {
    return MakeError(ErrorKind::kMalformedCorpus, field,
                     ": empty message sequence");
  }
  MessageSequence out;
  for (size_t i = 0; i < node.size(); ++i) {
    const std::string path = absl::StrCat(field, "[", i, "]");
    if (!node[i].is_string()) {
      return MakeError(ErrorKind::kMalformedCorpus, path,
                       ": expected a hex string");
    }
    absl::StatusOr<ByteArray> bytes = HexDecode(node[i].get<std::string>());
    if (!bytes.ok()) {
      return MakeError(ErrorKind::kMalformedCorpus, path, ": ",
                       bytes.status().message());
    }
    if (bytes->size() > kMaxMessageLength) {
      return MakeError(ErrorKind::kMalformedCorpus, path, ": ", bytes->size(),
                       " bytes exceeds the ", kMaxMessageLength,
                       "-byte limit");
    }
    out.push_back(*std::move(bytes));
  }
  return out;
}

Json EncodeMessages(const MessageSequence& seq) {
  Json arr = Json::array();
  for (const Message& m : seq) arr.push_back(HexEncode(m));
  return arr;
}

}  // namespace

absl::StatusOr<SeedCorpus> ParseSeedCorpus(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    return MakeError(ErrorKind::kMalformedCorpus, "syntax error at ",
                     Position(text, e.byte > 0 ? e.byte - 1 : 0), ": ",
                     e.what());
  }
  if (!doc.is_object()) {
    return MakeError(ErrorKind::kMalformedCorpus,
                     "top level: expected a JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (key != "seeds" && key != "restoring" && key != "restart_command") {
      return MakeError(ErrorKind::kMalformedCorpus, "unknown top-level key \"",
                       key, "\"");
    }
  }
  if (!doc.contains("seeds") || !doc["seeds"].is_array()) {
    return MakeError(ErrorKind::kMalformedCorpus,
                     "seeds: missing or not an array");
  }
  SeedCorpus corpus;
  const Json& seeds = doc["seeds"];
  if (seeds.empty()) {
    return MakeError(ErrorKind::kMalformedCorpus,
                     "seeds: corpus contains zero seeds");
  }
  for (size_t i = 0; i < seeds.size(); ++i) {
    const std::string path = absl::StrCat("seeds[", i, "]");
    const Json& node = seeds[i];
    if (!node.is_object()) {
      return MakeError(ErrorKind::kMalformedCorpus, path,
                       ": expected an object");
    }
    for (const auto& [key, value] : node.items()) {
      if (key != "id" && key != "messages" && key != "origin") {
        return MakeError(ErrorKind::kMalformedCorpus, path, ": unknown key \"",
                         key, "\"");
      }
    }
    if (!node.contains("id") || !node["id"].is_string()) {
      return MakeError(ErrorKind::kMalformedCorpus, path,
                       ".id: missing or not a string");
    }
    if (!node.contains("messages")) {
      return MakeError(ErrorKind::kMalformedCorpus, path,
                       ".messages: missing");
    }
    Seed seed;
    seed.id = node["id"].get<std::string>();
    absl::StatusOr<MessageSequence> seq =
        DecodeMessages(node["messages"], path + ".messages", false);
    if (!seq.ok()) return seq.status();
    seed.sequence = *std::move(seq);
    if (node.contains("origin") && !node["origin"].is_null()) {
      const Json& origin = node["origin"];
      if (!origin.is_object() || !origin.contains("parent") ||
          !origin["parent"].is_string() ||
          !origin.value("message_index", Json()).is_number_unsigned() ||
          !origin.value("category", Json()).is_number_integer()) {
        return MakeError(ErrorKind::kMalformedCorpus, path,
                         ".origin: expected {parent, message_index, "
                         "category}");
      }
      seed.origin = SeedOrigin::NewCategory(
          origin["parent"].get<std::string>(),
          origin["message_index"].get<size_t>(),
          origin["category"].get<CategoryId>());
    }
    corpus.seeds.push_back(std::move(seed));
  }
  if (doc.contains("restoring")) {
    absl::StatusOr<MessageSequence> seq =
        DecodeMessages(doc["restoring"], "restoring", true);
    if (!seq.ok()) return seq.status();
    corpus.restoring_sequence = *std::move(seq);
  }
  if (doc.contains("restart_command")) {
    const Json& cmd = doc["restart_command"];
    if (cmd.is_string()) {
      corpus.restart_command = cmd.get<std::string>();
    } else if (!cmd.is_null()) {
      return MakeError(ErrorKind::kMalformedCorpus,
                       "restart_command: expected a string or null");
    }
  }
  if (absl::Status st = ValidateCorpus(corpus); !st.ok()) return st;
  return corpus;
}

absl::StatusOr<SeedCorpus> LoadSeedCorpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return MakeError(ErrorKind::kMalformedCorpus, "cannot open ",
                     path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<SeedCorpus> corpus = ParseSeedCorpus(buffer.str());
  if (!corpus.ok()) {
    return absl::Status(corpus.status().code(),
                        absl::StrCat(corpus.status().message(), " [",
                                     path.string(), "]"));
  }
  return corpus;
}

std::string SerializeSeedCorpus(const SeedCorpus& corpus) {
  Json doc;
  doc["seeds"] = Json::array();
  for (const Seed& seed : corpus.seeds) {
    Json node;
    node["id"] = seed.id;
    node["messages"] = EncodeMessages(seed.sequence);
    if (seed.origin.kind == SeedOrigin::Kind::kNewCategory) {
      node["origin"] = {{"parent", seed.origin.parent},
                        {"message_index", seed.origin.message_index},
                        {"category", seed.origin.category}};
    }
    doc["seeds"].push_back(std::move(node));
  }
  doc["restoring"] = EncodeMessages(corpus.restoring_sequence);
  doc["restart_command"] = corpus.restart_command
                               ? Json(*corpus.restart_command)
                               : Json(nullptr);
  return doc.dump(2) + "\n";
}

}  // namespace snipfuzz
