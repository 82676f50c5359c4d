// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "remus/nn/tape.hpp"

namespace remus::nn {

struct ParamInfo {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;

    std::size_t size() const { return rows * cols; }
};

/// Flat parameter and gradient vectors plus a name manifest that tiles them
/// exactly, in registration order.
class ParamStore {
public:
    /// Registers a rows x cols block (zero-initialized); throws on duplicate names.
    std::size_t add(std::string name, std::size_t rows, std::size_t cols);
    /// Throws InvalidArgument for unknown names.
    std::size_t find(std::string_view name) const;

    const std::vector<ParamInfo>& manifest() const { return manifest_; }
    const ParamInfo& info(std::size_t id) const { return manifest_[id]; }
    std::size_t size() const { return values_.size(); }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::span<double> grads() { return grads_; }
    std::span<const double> grads() const { return grads_; }
    std::span<const double> values(std::size_t id) const { return std::span(values_).subspan(manifest_[id].offset, manifest_[id].size()); }
    std::span<double> values(std::size_t id) { return std::span(values_).subspan(manifest_[id].offset, manifest_[id].size()); }
    std::span<double> grads(std::size_t id) { return std::span(grads_).subspan(manifest_[id].offset, manifest_[id].size()); }

    void zero_grad();

    /// Rows [row_begin, row_begin + row_count) of parameter `id` as a tape
    /// leaf whose gradient accumulates into grads(). row_count 0 means all rows.
    /// Gradient buffers are the only state written through a const store.
    Var leaf(Tape& tape, std::size_t id, std::size_t row_begin = 0, std::size_t row_count = 0) const;

    /// True when both stores have identical manifests (names and shapes).
    bool same_layout(const ParamStore& other) const;

private:
    std::vector<ParamInfo> manifest_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> values_;
    mutable std::vector<double> grads_;
};

}  // namespace remus::nn
