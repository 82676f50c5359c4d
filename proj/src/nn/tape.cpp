// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/nn/tape.hpp"

#include "remus/error.hpp"

namespace remus::nn {

Matrix& grad_buffer(Node& node) {
    if (node.grad.size() == 0) node.grad = Matrix::Zero(node.value.rows(), node.value.cols());
    return node.grad;
}

Var Tape::constant(Matrix value) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    return Var(std::move(n));
}

Var Tape::leaf(Matrix value, GradFn sink) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    n->is_leaf = true;
    if (record_) {
        n->needs_grad = true;
        n->backward = std::move(sink);
        nodes_.push_back(n);
    }
    return Var(std::move(n));
}

Var Tape::record(Matrix value, std::initializer_list<const Var*> parents, GradFn backward) {
    return record(std::move(value), std::vector<const Var*>(parents), std::move(backward));
}

Var Tape::record(Matrix value, const std::vector<const Var*>& parents, GradFn backward) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    if (record_) {
        for (const Var* p : parents) n->needs_grad = n->needs_grad || p->needs_grad();
        if (n->needs_grad) {
            n->backward = std::move(backward);
            nodes_.push_back(n);
        }
    }
    return Var(std::move(n));
}

void Tape::backward(const Var& loss, bool keep) {
    if (loss.rows() != 1 || loss.cols() != 1) {
        throw Error(ErrorCode::InvalidArgument, "backward() needs a scalar loss");
    }
    if (!loss.needs_grad()) return;
    grad_buffer(*loss.node()).setOnes();
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        Node& n = **it;
        if (n.grad.size() != 0 && n.backward) n.backward(n.grad);
        if (!keep) {
            n.backward = nullptr;  // drops references to parents
            n.grad.resize(0, 0);
            if (!n.is_leaf && &n != loss.node().get()) n.value.resize(0, 0);
        }
    }
    if (!keep) nodes_.clear();
}

}  // namespace remus::nn
