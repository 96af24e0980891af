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

#ifndef SNIPFUZZ_ERRORS_H_
#define SNIPFUZZ_ERRORS_H_

#include <string_view>

#include "absl/status/status.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"

namespace snipfuzz {

// Domain error kinds. Each is carried as an absl::Status whose message starts
// with "<Kind>: " so callers can branch on the kind without string parsing.
enum class ErrorKind {
  kMalformedCorpus,
  kInvalidPartition,
  kEmptyMessage,
  kLengthMismatch,
  kMissingCategory,
  kInvalidSnippet,
  kMutationOverflow,
  kNotApplicable,
  kConnectionError,
  kRestartHookFailed,
  kPortInUse,
  kTargetUnreachable,
  kInvalidConfig,
};

constexpr const char* ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedCorpus: return "MalformedCorpus";
    case ErrorKind::kInvalidPartition: return "InvalidPartition";
    case ErrorKind::kEmptyMessage: return "EmptyMessage";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kMissingCategory: return "MissingCategory";
    case ErrorKind::kInvalidSnippet: return "InvalidSnippet";
    case ErrorKind::kMutationOverflow: return "MutationOverflow";
    case ErrorKind::kNotApplicable: return "NotApplicable";
    case ErrorKind::kConnectionError: return "ConnectionError";
    case ErrorKind::kRestartHookFailed: return "RestartHookFailed";
    case ErrorKind::kPortInUse: return "PortInUse";
    case ErrorKind::kTargetUnreachable: return "TargetUnreachable";
    case ErrorKind::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

constexpr absl::StatusCode ErrorKindCode(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConnectionError:
    case ErrorKind::kTargetUnreachable:
    case ErrorKind::kRestartHookFailed:
      return absl::StatusCode::kUnavailable;
    case ErrorKind::kPortInUse:
      return absl::StatusCode::kAlreadyExists;
    case ErrorKind::kMutationOverflow:
      return absl::StatusCode::kOutOfRange;
    case ErrorKind::kNotApplicable:
    case ErrorKind::kMissingCategory:
      return absl::StatusCode::kFailedPrecondition;
    default:
      return absl::StatusCode::kInvalidArgument;
  }
}

namespace internal {
// absl here is built with its own string_view type; adapt std ones.
inline absl::string_view Piece(std::string_view s) {
  return absl::string_view(s.data(), s.size());
}
template <typename T>
const T& Piece(const T& v) {
  return v;
}
}  // namespace internal

template <typename... Args>
absl::Status MakeError(ErrorKind kind, const Args&... args) {
  return absl::Status(ErrorKindCode(kind),
                      absl::StrCat(ErrorKindName(kind), ": ", internal::Piece(args)...));
}

inline bool IsError(const absl::Status& status, ErrorKind kind) {
  return !status.ok() &&
         absl::StartsWith(status.message(),
                          absl::StrCat(ErrorKindName(kind), ":"));
}

}  // namespace snipfuzz

#endif  // SNIPFUZZ_ERRORS_H_
