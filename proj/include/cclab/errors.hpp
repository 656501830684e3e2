// Copyright 2026 The cclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cclab {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CCLAB_DEFINE_ERROR(Name)        \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  };

CCLAB_DEFINE_ERROR(RangeError)
CCLAB_DEFINE_ERROR(ModeMismatch)
CCLAB_DEFINE_ERROR(LengthMismatch)
CCLAB_DEFINE_ERROR(ParamError)
CCLAB_DEFINE_ERROR(KeyMismatch)
CCLAB_DEFINE_ERROR(DimensionMismatch)
CCLAB_DEFINE_ERROR(OverflowBudgetExceeded)
CCLAB_DEFINE_ERROR(DecryptionFailure)
CCLAB_DEFINE_ERROR(TransportError)
CCLAB_DEFINE_ERROR(SessionMismatch)
CCLAB_DEFINE_ERROR(FrameError)
CCLAB_DEFINE_ERROR(DegenerateData)
CCLAB_DEFINE_ERROR(InfeasiblePlan)
CCLAB_DEFINE_ERROR(ConfigError)

#undef CCLAB_DEFINE_ERROR

// A protocol run stopped. `reason` is a short machine-friendly word such as
// "dimension", "transport", "timeout" or "missing shares".
class ProtocolAbort : public Error {
 public:
  explicit ProtocolAbort(std::string reason, std::string detail = {})
      : Error(detail.empty() ? "abort: " + reason
                             : "abort: " + reason + ": " + detail),
        reason_(std::move(reason)) {}

  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

// CSV ingestion failure; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace cclab
