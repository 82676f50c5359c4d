// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/graph_ops.hpp"

#include <string>

#include "remus/error.hpp"

namespace remus::graph {

using nn::grad_buffer;
using nn::Tape;
using nn::Var;

Var aggregate(Tape& tape, const Var& edge_features, const PinvTable& pinv) {
    if (static_cast<std::size_t>(edge_features.rows()) != pinv.nodes() * pinv.kappa) {
        throw Error(ErrorCode::InvalidArgument, "aggregate: " + std::to_string(edge_features.rows()) +
                                                    " edge rows for " + std::to_string(pinv.nodes()) + " nodes");
    }
    Matrix out = aggregate_features(pinv, edge_features.value());
    const PinvTable* table = &pinv;
    return tape.record(std::move(out), {&edge_features}, [edge_features, table](const Matrix& g) {
        Matrix& dx = grad_buffer(*edge_features.node());
        kernels::active::apply_pinv_adjoint(table->data, table->kappa, table->nodes(), g.data(),
                                            static_cast<std::size_t>(dx.cols()), dx.data());
    });
}

std::shared_ptr<const InterpPlan> InterpPlan::make(std::span<const kernels::Stencil> stencils,
                                                   std::size_t coarse_rows) {
    auto p = std::make_shared<InterpPlan>();
    p->stencils = stencils;
    p->coarse_rows = coarse_rows;
    std::vector<std::uint32_t> flat(3 * stencils.size());
    for (std::size_t k = 0; k < stencils.size(); ++k) {
        for (std::size_t t = 0; t < 3; ++t) flat[3 * k + t] = stencils[k].src[t];
    }
    p->scatter = kernels::ScatterPlan::build(flat, coarse_rows);
    return p;
}

Var interpolate(Tape& tape, const Var& coarse, std::shared_ptr<const InterpPlan> plan) {
    if (static_cast<std::size_t>(coarse.rows()) != plan->coarse_rows) {
        throw Error(ErrorCode::InvalidArgument, "interpolate: coarse row count mismatch");
    }
    Matrix out = interpolate_rows(plan->stencils, coarse.value());
    return tape.record(std::move(out), {&coarse}, [coarse, plan](const Matrix& g) {
        Matrix& dc = grad_buffer(*coarse.node());
        kernels::active::interpolate_adjoint(plan->stencils, plan->scatter, g.data(), static_cast<std::size_t>(g.cols()),
                                             dc.data());
    });
}

Var project(Tape& tape, const Var& node_features, const EdgeSet& edges) {
    if (static_cast<std::size_t>(node_features.rows()) != edges.node_count() || node_features.cols() % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument, "project: node feature shape does not match the edge set");
    }
    Matrix out = project_features(edges, node_features.value());
    const EdgeSet* es = &edges;
    return tape.record(std::move(out), {&node_features}, [node_features, es](const Matrix& g) {
        Matrix& dw = grad_buffer(*node_features.node());
        kernels::active::project_rows_adjoint(es->unit, es->kappa, g.data(), static_cast<std::size_t>(g.cols()),
                                              dw.data());
    });
}

}  // namespace remus::graph
