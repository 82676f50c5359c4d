// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Reverse-mode gradient tape over whole matrices. Each recorded operation
// stores its output and a closure that pushes the output gradient into its
// parents. Only the operations the model uses exist (see layers.hpp and
// graph_ops.hpp); this is not a general autodiff system.

#pragma once

#include <functional>
#include <initializer_list>
#include <memory>
#include <vector>

#include "remus/matrix.hpp"

namespace remus::nn {

using GradFn = std::function<void(const Matrix& out_grad)>;

struct Node {
    Matrix value;
    Matrix grad;  // empty until the first contribution
    bool needs_grad = false;
    GradFn backward;  // ops: propagate to parents; leaves: gradient sink
    bool is_leaf = false;
};

/// Zero-initialized gradient buffer of `node`, allocated on first use.
Matrix& grad_buffer(Node& node);

class Var {
public:
    Var() = default;
    explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

    const Matrix& value() const { return node_->value; }
    Eigen::Index rows() const { return node_->value.rows(); }
    Eigen::Index cols() const { return node_->value.cols(); }
    bool needs_grad() const { return node_ && node_->needs_grad; }
    const std::shared_ptr<Node>& node() const { return node_; }
    explicit operator bool() const { return static_cast<bool>(node_); }

private:
    std::shared_ptr<Node> node_;
};

class Tape {
public:
    /// With record == false the tape only evaluates: no closures are kept and
    /// intermediates are freed as soon as their Var goes out of scope.
    explicit Tape(bool record = true) : record_(record) {}

    bool recording() const { return record_; }

    Var constant(Matrix value);
    /// Differentiable input; `sink` receives its total gradient during backward().
    Var leaf(Matrix value, GradFn sink);
    /// Result of an operation over `parents`. `backward` is dropped when no
    /// parent needs a gradient.
    Var record(Matrix value, std::initializer_list<const Var*> parents, GradFn backward);
    Var record(Matrix value, const std::vector<const Var*>& parents, GradFn backward);

    /// Propagates d(loss)/d(.) through every recorded node, calling leaf sinks.
    /// Intermediate values are released as they are consumed unless `keep` is set.
    void backward(const Var& loss, bool keep = false);

    std::size_t size() const { return nodes_.size(); }

private:
    bool record_;
    std::vector<std::shared_ptr<Node>> nodes_;
};

}  // namespace remus::nn
