// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/nn/mlp.hpp"

#include <cmath>
#include <random>

#include "remus/error.hpp"

namespace remus::nn {

std::uint64_t hash_name(std::string_view name) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

Mlp Mlp::create(ParamStore& store, const std::string& prefix, std::vector<std::size_t> widths, bool normalize) {
    if (widths.size() < 2) throw Error(ErrorCode::InvalidArgument, "an MLP needs at least one layer");
    Mlp m;
    m.widths_ = std::move(widths);
    for (std::size_t l = 0; l + 1 < m.widths_.size(); ++l) {
        m.weights_.push_back(store.add(prefix + ".w" + std::to_string(l), m.widths_[l], m.widths_[l + 1]));
        m.biases_.push_back(store.add(prefix + ".b" + std::to_string(l), 1, m.widths_[l + 1]));
    }
    if (normalize) {
        m.gain_ = store.add(prefix + ".ln.g", 1, m.widths_.back());
        m.shift_ = store.add(prefix + ".ln.b", 1, m.widths_.back());
    }
    return m;
}

Var Mlp::forward(Tape& tape, const ParamStore& store, std::span<const MlpInput> inputs) const {
    std::vector<LinearTerm> terms;
    std::size_t row = 0;
    for (const MlpInput& in : inputs) {
        const std::size_t width = static_cast<std::size_t>(in.x.cols());
        terms.push_back(LinearTerm{in.x, in.gather, store.leaf(tape, weights_[0], row, width)});
        row += width;
    }
    if (row != widths_.front()) {
        throw Error(ErrorCode::InvalidArgument,
                    "MLP expects " + std::to_string(widths_.front()) + " inputs, got " + std::to_string(row));
    }
    Var h = linear(tape, terms, store.leaf(tape, biases_[0]));
    for (std::size_t l = 1; l < weights_.size(); ++l) {
        h = selu(tape, h);
        h = linear(tape, h, store.leaf(tape, weights_[l]), store.leaf(tape, biases_[l]));
    }
    if (gain_ != kNone) h = layer_norm(tape, h, store.leaf(tape, gain_), store.leaf(tape, shift_));
    return h;
}

Var Mlp::forward(Tape& tape, const ParamStore& store, const Var& x) const {
    const MlpInput in{x, nullptr};
    return forward(tape, store, std::span<const MlpInput>(&in, 1));
}

void Mlp::initialize(ParamStore& store, std::uint64_t seed) const {
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const ParamInfo& w = store.info(weights_[l]);
        std::mt19937_64 rng(seed ^ hash_name(w.name));
        std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(w.rows)));
        for (double& v : store.values(weights_[l])) v = normal(rng);
        for (double& v : store.values(biases_[l])) v = 0.0;
    }
    if (gain_ != kNone) {
        for (double& v : store.values(gain_)) v = 1.0;
        for (double& v : store.values(shift_)) v = 0.0;
    }
}

std::vector<double> mlp_forward(const Mlp& mlp, const ParamStore& store, std::span<const double> input) {
    Tape tape(false);
    Matrix x = Eigen::Map<const Matrix>(input.data(), 1, static_cast<Eigen::Index>(input.size()));
    const Var out = mlp.forward(tape, store, tape.constant(std::move(x)));
    return std::vector<double>(out.value().data(), out.value().data() + out.value().size());
}

}  // namespace remus::nn
