// Copyright 2026 The chist Authors
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

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chist {

enum class ErrorKind {
    Dimension,       // dimension cap exceeded or mismatched dims
    Shape,           // non-square where square required
    NonFinite,
    Symmetry,        // non-Hermitian input to a Hermitian routine
    Normalization,
    Projector,       // P != P^dagger or P^2 != P
    Completeness,
    Orthogonality,
    ZeroProjector,
    NotUnitary,
    Orthonormality,
    Index,
    Space,           // unknown subsystem, order mismatch, space mismatch
    Incompatible,    // single framework rule violation
    Inconsistent,
    UndefinedConditional,
    Parse,
    Validation,
    Io,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::Symmetry: return "symmetry";
    case ErrorKind::Normalization: return "normalization";
    case ErrorKind::Projector: return "projector";
    case ErrorKind::Completeness: return "completeness";
    case ErrorKind::Orthogonality: return "orthogonality";
    case ErrorKind::ZeroProjector: return "zero_projector";
    case ErrorKind::NotUnitary: return "not_unitary";
    case ErrorKind::Orthonormality: return "orthonormality";
    case ErrorKind::Index: return "index";
    case ErrorKind::Space: return "space";
    case ErrorKind::Incompatible: return "incompatible";
    case ErrorKind::Inconsistent: return "inconsistent";
    case ErrorKind::UndefinedConditional: return "undefined_conditional";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

/// Inverse of to_string; false if `name` is not a kind.
constexpr bool error_kind_from_string(std::string_view name, ErrorKind &out) {
    for (int k = 0; k <= static_cast<int>(ErrorKind::Io); ++k) {
        if (to_string(static_cast<ErrorKind>(k)) == name) {
            out = static_cast<ErrorKind>(k);
            return true;
        }
    }
    return false;
}

/// Twelve significant digits, never "-0". Used for every number in messages
/// and reports.
inline std::string format_real(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

/// Base exception for every failure raised by the library. `kind()` lets
/// callers (and the CLI exit-code mapping) dispatch without string matching.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

} // namespace chist
