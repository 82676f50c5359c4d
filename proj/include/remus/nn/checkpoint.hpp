// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Checkpoint layout:
//   bytes 0..5   "REMUS1"
//   bytes 6..13  little-endian uint64: byte length H of the JSON header
//   next H bytes UTF-8 JSON: {"manifest": [{"name","rows","cols"}...], ...metadata}
//   remainder    every parameter as little-endian float64, in manifest order

#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "remus/nn/param_store.hpp"

namespace remus::nn {

struct Checkpoint {
    nlohmann::json header;  // metadata, including "manifest"
    std::vector<ParamInfo> manifest;
    std::vector<double> values;
};

/// `metadata` is stored alongside the manifest (model config, hyperparameters, seed).
void save_checkpoint(const std::filesystem::path& path, const ParamStore& params, nlohmann::json metadata);

/// Throws ParseError on malformed or truncated files, VersionMismatch on a
/// REMUS magic with another version.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies checkpoint values into `params`; throws InvalidArgument when the manifests differ.
void restore(ParamStore& params, const Checkpoint& checkpoint);

/// Little-endian float64 helpers shared with the field file format.
void write_f64_le(std::vector<char>& out, double v);
double read_f64_le(const char* bytes);

}  // namespace remus::nn
