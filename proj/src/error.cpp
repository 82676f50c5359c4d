// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/error.hpp"

namespace remus {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::TooFewNodes: return "TooFewNodes";
        case ErrorCode::DuplicateNodes: return "DuplicateNodes";
        case ErrorCode::DegenerateEdge: return "DegenerateEdge";
        case ErrorCode::DegenerateDirections: return "DegenerateDirections";
        case ErrorCode::HierarchyTooDeep: return "HierarchyTooDeep";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::BadFamily: return "BadFamily";
        case ErrorCode::NonFiniteState: return "NonFiniteState";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace remus
