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

#include "msp/errors.hpp"

namespace msp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNumericalFailure: return "NumericalFailure";
    case ErrorKind::kUnstableChain: return "UnstableChain";
    case ErrorKind::kUnsupportedFixture: return "UnsupportedFixture";
    case ErrorKind::kEmptyBasis: return "EmptyBasis";
    case ErrorKind::kInsufficientDof: return "InsufficientDOF";
    case ErrorKind::kInvalidPair: return "InvalidPair";
    case ErrorKind::kTooManyGates: return "TooManyGates";
    case ErrorKind::kInfeasibleAssignment: return "InfeasibleAssignment";
    case ErrorKind::kDegenerateSolution: return "DegenerateSolution";
    case ErrorKind::kSignInfeasible: return "SignInfeasible";
    case ErrorKind::kUnsupportedGraph: return "UnsupportedGraph";
    case ErrorKind::kInvalidCount: return "InvalidCount";
    case ErrorKind::kInvalidSchedule: return "InvalidSchedule";
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kSamplingError: return "SamplingError";
    case ErrorKind::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      message_(message) {}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace msp
