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

#include "qndsim/error.h"

namespace qnd {

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidDimension:
            return "invalid-dimension";
        case ErrorKind::InvalidArgument:
            return "invalid-argument";
        case ErrorKind::DimensionMismatch:
            return "dimension-mismatch";
        case ErrorKind::Range:
            return "range";
        case ErrorKind::Truncation:
            return "truncation";
        case ErrorKind::GridCoverage:
            return "grid-coverage";
        case ErrorKind::Nonconvergence:
            return "integration-nonconvergence";
        case ErrorKind::UnnormalizableOutcome:
            return "unnormalizable-outcome";
        case ErrorKind::EdgeContamination:
            return "edge-contamination";
        case ErrorKind::TooFewTrials:
            return "too-few-trials";
        case ErrorKind::InsufficientEvents:
            return "insufficient-events";
        case ErrorKind::Eigendecomposition:
            return "eigendecomposition";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {
}

}  // namespace qnd
