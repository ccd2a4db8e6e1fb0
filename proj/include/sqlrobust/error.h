// Copyright 2026 The sqlrobust Authors.
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

#ifndef SQLROBUST_ERROR_H_
#define SQLROBUST_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sqlrobust {

// Error categories. The numeric values double as CLI exit codes.
enum class ErrorCode : int {
  kUsage = 1,
  kInput = 2,
  kTransport = 3,
  kValidation = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Unreadable or malformed input (bad JSON, missing fields, unreadable files).
class InputError : public Error {
 public:
  explicit InputError(const std::string &message)
      : Error(ErrorCode::kInput, message) {}
};

// Well-formed input that breaks a domain invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &message)
      : Error(ErrorCode::kValidation, message) {}
};

// Unreachable endpoint, dead subprocess, or timeout.
class TransportError : public Error {
 public:
  explicit TransportError(const std::string &message)
      : Error(ErrorCode::kTransport, message) {}
};

// The remote side answered, but not according to the wire contract.
class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string &message)
      : Error(ErrorCode::kTransport, message) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string &message)
      : Error(ErrorCode::kUsage, message) {}
};

// SQL text rejected by the parser or binder. `offset` is a byte offset into
// the query text.
class SqlError : public Error {
 public:
  enum class Kind { kLexical, kSyntax, kUnknownTable, kUnknownColumn, kUnsupported, kInvalid };

  SqlError(Kind kind, std::size_t offset, const std::string &message)
      : Error(ErrorCode::kInput, message + " at offset " + std::to_string(offset)),
        kind_(kind),
        offset_(offset) {}

  Kind kind() const { return kind_; }
  std::size_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

}  // namespace sqlrobust

#endif  // SQLROBUST_ERROR_H_
