// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "remus/nn/layers.hpp"
#include "remus/nn/param_store.hpp"

namespace remus::nn {

/// A first-layer input block, optionally row-gathered from a smaller table.
struct MlpInput {
    Var x;
    std::shared_ptr<const GatherIndex> gather;
};

/// Dense layers with SELU between them, identity after the last one and an
/// optional per-row normalization of the output.
class Mlp {
public:
    Mlp() = default;

    /// Registers `<prefix>.w<i>`, `<prefix>.b<i>` (and `<prefix>.ln.g`,
    /// `<prefix>.ln.b`) in `store`. widths = {in, hidden..., out}.
    static Mlp create(ParamStore& store, const std::string& prefix, std::vector<std::size_t> widths, bool normalize);

    std::size_t in_width() const { return widths_.front(); }
    std::size_t out_width() const { return widths_.back(); }
    std::size_t layers() const { return weights_.size(); }
    bool normalized() const { return gain_ != kNone; }

    /// Input blocks are concatenated column-wise; their widths must sum to in_width().
    Var forward(Tape& tape, const ParamStore& store, std::span<const MlpInput> inputs) const;
    Var forward(Tape& tape, const ParamStore& store, const Var& x) const;

    /// Weights ~ N(0, 1/fan_in), zero biases, unit gain, zero shift. Each
    /// parameter draws from its own stream seeded by (seed, name).
    void initialize(ParamStore& store, std::uint64_t seed) const;

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
    std::vector<std::size_t> widths_;
    std::vector<std::size_t> weights_;
    std::vector<std::size_t> biases_;
    std::size_t gain_ = kNone;
    std::size_t shift_ = kNone;
};

/// Single-vector evaluation.
std::vector<double> mlp_forward(const Mlp& mlp, const ParamStore& store, std::span<const double> input);

/// 64-bit FNV-1a, used to derive per-parameter seeds.
std::uint64_t hash_name(std::string_view name);

}  // namespace remus::nn
