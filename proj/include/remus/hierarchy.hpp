// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"
#include "remus/geometry.hpp"
#include "remus/kernels.hpp"
#include "remus/operators.hpp"

namespace remus {

/// One scale of the multi-scale representation.
struct LevelGraph {
    NodeSet nodes;
    std::vector<NodeId> finest;  // id of each node in the level-0 node set
    EdgeSet edges;
    AngleSet angles;
    PinvTable pinv;
};

/// Levels are zero-based: levels[0] is the input resolution.
struct Hierarchy {
    std::size_t kappa = 0;
    std::vector<LevelGraph> levels;
    /// child_index[l] maps node ids of level l to ids in level l-1 (empty for l = 0).
    std::vector<std::vector<NodeId>> child_index;
    /// pool_angles[l] joins incoming edges of level l-1 to edges of level l
    /// (empty for l = 0). Triples hold level l-1 node ids.
    std::vector<AngleSet> pool_angles;
    /// interp[l] has one stencil per node of level l into the nodes of level l+1
    /// (empty for the coarsest level).
    std::vector<std::vector<kernels::Stencil>> interp;

    std::size_t depth() const { return levels.size(); }
};

/// Greedy maximal independent set of the undirected neighbor graph, swept in
/// ascending node index. Returns kept ids in ascending order.
std::vector<NodeId> guillard_coarsen(std::size_t node_count, const EdgeSet& edges);

/// Three nearest coarse nodes of every fine node with normalized
/// inverse-square-distance weights; a coincident coarse node takes weight 1.
std::vector<kernels::Stencil> interp_weights(std::span<const Vec2> fine, std::span<const Vec2> coarse);

/// Throws HierarchyTooDeep when a level would keep <= kappa nodes and
/// DegenerateDirections (naming level and node) from the pseudoinverse blocks.
Hierarchy build_hierarchy(const NodeSet& nodes, std::size_t kappa, std::size_t levels);

/// Level sizes, degree histograms and conditioning minima.
nlohmann::json summarize(const Hierarchy& h);

}  // namespace remus
