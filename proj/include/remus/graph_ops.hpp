// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Differentiable versions of the operators-module kernels. The geometry
// arguments (pinv tables, edge sets, stencils) are referenced, not copied:
// they must outlive any backward() call on the tape.

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "remus/geometry.hpp"
#include "remus/kernels.hpp"
#include "remus/nn/tape.hpp"
#include "remus/operators.hpp"

namespace remus::graph {

/// Edge features (|E| x F) to node-feature matrices (n x 2F).
nn::Var aggregate(nn::Tape& tape, const nn::Var& edge_features, const PinvTable& pinv);

struct InterpPlan {
    std::span<const kernels::Stencil> stencils;
    kernels::ScatterPlan scatter;
    std::size_t coarse_rows = 0;

    static std::shared_ptr<const InterpPlan> make(std::span<const kernels::Stencil> stencils, std::size_t coarse_rows);
};

/// Coarse node rows to fine node rows.
nn::Var interpolate(nn::Tape& tape, const nn::Var& coarse, std::shared_ptr<const InterpPlan> plan);

/// Node-feature matrices (n x 2F) to per-edge features e_lk W_k (|E| x F).
nn::Var project(nn::Tape& tape, const nn::Var& node_features, const EdgeSet& edges);

}  // namespace remus::graph
