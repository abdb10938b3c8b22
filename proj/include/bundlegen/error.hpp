// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace bundlegen {

enum class ErrorKind {
  kUnknownItem,
  kDegenerateInput,
  kParseError,
  kEmptyCorpus,
  kAllMasked,
  kSingularKernel,
  kEmptyContext,
  kShortList,
  kDegenerateList,
  kInvalidArgument,
  kIncompatibleArtifact,
  kDivergence,
  kIo,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownItem: return "UnknownItem";
    case ErrorKind::kDegenerateInput: return "DegenerateInput";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kAllMasked: return "AllMasked";
    case ErrorKind::kSingularKernel: return "SingularKernel";
    case ErrorKind::kEmptyContext: return "EmptyContext";
    case ErrorKind::kShortList: return "ShortList";
    case ErrorKind::kDegenerateList: return "DegenerateList";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIncompatibleArtifact: return "IncompatibleArtifact";
    case ErrorKind::kDivergence: return "Divergence";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can map it to an exit code without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error(ErrorKind::kParseError,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bundlegen
