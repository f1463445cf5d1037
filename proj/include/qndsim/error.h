// Copyright 2026 The qndsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QNDSIM_ERROR_H
#define QNDSIM_ERROR_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace qnd {

enum class ErrorKind {
    InvalidDimension,
    InvalidArgument,
    DimensionMismatch,
    Range,
    Truncation,
    GridCoverage,
    Nonconvergence,
    UnnormalizableOutcome,
    EdgeContamination,
    TooFewTrials,
    InsufficientEvents,
    Eigendecomposition,
};

std::string_view error_kind_name(ErrorKind kind);

/// Single exception type for the library; `kind()` tells callers which
/// precondition or numerical contract was violated.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message);

    ErrorKind kind() const noexcept {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

}  // namespace qnd

#endif
