// Copyright 2026 The msparallel Authors
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
#include <string_view>

namespace msp {

enum class ErrorKind {
  kNumericalFailure,
  kUnstableChain,
  kUnsupportedFixture,
  kEmptyBasis,
  kInsufficientDof,
  kInvalidPair,
  kTooManyGates,
  kInfeasibleAssignment,
  kDegenerateSolution,
  kSignInfeasible,
  kUnsupportedGraph,
  kInvalidCount,
  kInvalidSchedule,
  kInvalidInput,
  kSamplingError,
  kConfigError,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this exception; `kind()` is the
// stable, machine-readable part and `what()` carries the human message.
// Messages number ions, qubits and modes from 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  /// what() without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace msp
