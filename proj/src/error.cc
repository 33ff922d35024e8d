// Copyright 2026 The cvsq Authors
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

#include "cvsq/error.h"

namespace cvsq {

const char *error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidDimension:
            return "invalid-dimension";
        case ErrorKind::DimensionMismatch:
            return "dimension-mismatch";
        case ErrorKind::InvalidArgument:
            return "invalid-argument";
        case ErrorKind::Numeric:
            return "numeric";
        case ErrorKind::Unsupported:
            return "unsupported";
        case ErrorKind::CutoffTooSmall:
            return "cutoff-too-small";
        case ErrorKind::DegenerateProjection:
            return "degenerate-projection";
        case ErrorKind::Configuration:
            return "configuration";
        case ErrorKind::SpectralWindow:
            return "spectral-window";
        case ErrorKind::UnstableDenominator:
            return "unstable-denominator";
        case ErrorKind::Structural:
            return "structural";
        case ErrorKind::MemoryGuard:
            return "memory-guard";
        case ErrorKind::Validation:
            return "validation";
    }
    return "unknown";
}

Error::Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind_(kind) {
}

void fail(ErrorKind kind, const std::string &message) {
    throw Error(kind, message);
}

}  // namespace cvsq
