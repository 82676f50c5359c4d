// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace remus {

enum class ErrorCode {
    TooFewNodes,
    DuplicateNodes,
    DegenerateEdge,
    DegenerateDirections,
    HierarchyTooDeep,
    ParseError,
    VersionMismatch,
    BadFamily,
    NonFiniteState,
    NonFiniteLoss,
    InvalidArgument,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Domain error raised by every library operation. The CLI maps these to
/// exit code 1.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

    ErrorCode code() const noexcept { return code_; }
    /// The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace remus
