// Copyright 2026 The tsqt Authors
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

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsqt {

enum class ErrorKind {
    DimensionMismatch,
    ZeroVector,
    NotOrthonormal,
    DegenerateSpectrum,
    EmptyEnsemble,
    IndexOutOfRange,
    InvalidArgument,
    UnorderedTimeline,
    MissingPrepare,
    MissingPostselect,
    BadNesting,
    UnknownName,
    OutOfRange,
    InvalidQuery,
    NotMeasurementReady,
    NullImpossible,
    ContainsIrreversibleEvent,
    NoSamplesKept,
    ParseError,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::NotOrthonormal: return "NotOrthonormal";
        case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
        case ErrorKind::EmptyEnsemble: return "EmptyEnsemble";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::UnorderedTimeline: return "UnorderedTimeline";
        case ErrorKind::MissingPrepare: return "MissingPrepare";
        case ErrorKind::MissingPostselect: return "MissingPostselect";
        case ErrorKind::BadNesting: return "BadNesting";
        case ErrorKind::UnknownName: return "UnknownName";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::InvalidQuery: return "InvalidQuery";
        case ErrorKind::NotMeasurementReady: return "NotMeasurementReady";
        case ErrorKind::NullImpossible: return "NullImpossible";
        case ErrorKind::ContainsIrreversibleEvent: return "ContainsIrreversibleEvent";
        case ErrorKind::NoSamplesKept: return "NoSamplesKept";
        case ErrorKind::ParseError: return "ParseError";
    }
    return "Unknown";
}

/// Every failure raised by the library. `kind()` is the stable, testable part;
/// the message is for humans.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

}  // namespace tsqt
