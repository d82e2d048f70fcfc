// Copyright 2026 The crgate Authors
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

namespace crgate {

enum class ErrorKind {
    InvalidArgument,
    LabelingAmbiguous,
    ContinuationLost,
    PoleSingularity,
    StepTooCoarse,
    UnwrapAmbiguous,
    DegenerateBlock,
    RankDeficientBlock,
    NoBracket,
    Unreachable,
    ZeroSpeed,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::LabelingAmbiguous: return "LabelingAmbiguous";
        case ErrorKind::ContinuationLost: return "ContinuationLost";
        case ErrorKind::PoleSingularity: return "PoleSingularity";
        case ErrorKind::StepTooCoarse: return "StepTooCoarse";
        case ErrorKind::UnwrapAmbiguous: return "UnwrapAmbiguous";
        case ErrorKind::DegenerateBlock: return "DegenerateBlock";
        case ErrorKind::RankDeficientBlock: return "RankDeficientBlock";
        case ErrorKind::NoBracket: return "NoBracket";
        case ErrorKind::Unreachable: return "Unreachable";
        case ErrorKind::ZeroSpeed: return "ZeroSpeed";
    }
    return "Unknown";
}

// All library failures carry a kind so sweeps can record the class of a
// failed grid point instead of dropping it.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace crgate
