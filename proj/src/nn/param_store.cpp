// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/nn/param_store.hpp"

#include <algorithm>

#include "remus/error.hpp"

namespace remus::nn {

std::size_t ParamStore::add(std::string name, std::size_t rows, std::size_t cols) {
    if (index_.contains(name)) throw Error(ErrorCode::InvalidArgument, "duplicate parameter " + name);
    const std::size_t id = manifest_.size();
    index_.emplace(name, id);
    manifest_.push_back(ParamInfo{std::move(name), values_.size(), rows, cols});
    values_.resize(values_.size() + rows * cols, 0.0);
    grads_.resize(values_.size(), 0.0);
    return id;
}

std::size_t ParamStore::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw Error(ErrorCode::InvalidArgument, "unknown parameter " + std::string(name));
    return it->second;
}

void ParamStore::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

Var ParamStore::leaf(Tape& tape, std::size_t id, std::size_t row_begin, std::size_t row_count) const {
    const ParamInfo& p = manifest_[id];
    if (row_count == 0) row_count = p.rows - row_begin;
    const std::size_t offset = p.offset + row_begin * p.cols;
    Matrix value = Eigen::Map<const Matrix>(values_.data() + offset, static_cast<Eigen::Index>(row_count),
                                            static_cast<Eigen::Index>(p.cols));
    if (!tape.recording()) return tape.constant(std::move(value));
    double* grad = grads_.data() + offset;
    return tape.leaf(std::move(value), [grad](const Matrix& g) {
        Eigen::Map<Matrix>(grad, g.rows(), g.cols()) += g;
    });
}

bool ParamStore::same_layout(const ParamStore& other) const {
    if (manifest_.size() != other.manifest_.size()) return false;
    for (std::size_t i = 0; i < manifest_.size(); ++i) {
        const ParamInfo& a = manifest_[i];
        const ParamInfo& b = other.manifest_[i];
        if (a.name != b.name || a.rows != b.rows || a.cols != b.cols) return false;
    }
    return true;
}

}  // namespace remus::nn
