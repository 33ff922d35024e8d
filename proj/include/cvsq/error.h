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

#ifndef CVSQ_ERROR_H
#define CVSQ_ERROR_H

#include <stdexcept>
#include <string>

namespace cvsq {

enum class ErrorKind {
    InvalidDimension,
    DimensionMismatch,
    InvalidArgument,
    Numeric,
    Unsupported,
    CutoffTooSmall,
    DegenerateProjection,
    Configuration,
    SpectralWindow,
    UnstableDenominator,
    Structural,
    MemoryGuard,
    Validation,
};

const char *error_kind_name(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &message);
    ErrorKind kind() const {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string &message);

inline void require(bool condition, ErrorKind kind, const std::string &message) {
    if (!condition) {
        fail(kind, message);
    }
}

}  // namespace cvsq

#endif
