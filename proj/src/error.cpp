// Copyright 2026 The adiabound Authors
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

#include "adiabound/error.hpp"

namespace adiabound {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian: return "NonHermitian";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::AmbiguousMatching: return "AmbiguousMatching";
    case ErrorKind::DegenerateGroundState: return "DegenerateGroundState";
    case ErrorKind::DifferentiationFailure: return "DifferentiationFailure";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownModel: return "UnknownModel";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::NoAnalytics: return "NoAnalytics";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::TimesNotOnGrid: return "TimesNotOnGrid";
    case ErrorKind::QuadratureBudget: return "QuadratureBudget";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_input_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonHermitian:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::ParseError:
    case ErrorKind::UnknownModel:
    case ErrorKind::ValidationError:
    case ErrorKind::NoAnalytics:
    case ErrorKind::TimesNotOnGrid:
    case ErrorKind::IoError:
      return true;
    default:
      return false;
  }
}

}  // namespace adiabound
