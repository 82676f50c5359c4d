// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/hierarchy.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <utility>

#include "remus/error.hpp"

namespace remus {

std::vector<NodeId> guillard_coarsen(std::size_t node_count, const EdgeSet& edges) {
    std::vector<std::vector<NodeId>> adjacent(node_count);
    for (const Edge& e : edges.edges) {
        adjacent[e.src].push_back(e.dst);
        adjacent[e.dst].push_back(e.src);
    }
    enum class Mark : std::uint8_t { Open, Kept, Removed };
    std::vector<Mark> mark(node_count, Mark::Open);
    std::vector<NodeId> kept;
    for (std::size_t v = 0; v < node_count; ++v) {
        if (mark[v] != Mark::Open) continue;
        mark[v] = Mark::Kept;
        kept.push_back(static_cast<NodeId>(v));
        for (NodeId w : adjacent[v]) {
            if (mark[w] == Mark::Open) mark[w] = Mark::Removed;
        }
    }
    return kept;
}

std::vector<kernels::Stencil> interp_weights(std::span<const Vec2> fine, std::span<const Vec2> coarse) {
    if (coarse.size() < 3) {
        throw Error(ErrorCode::InvalidArgument, "interpolation needs at least 3 coarse nodes");
    }
    std::vector<kernels::Stencil> out(fine.size());
    std::vector<std::pair<double, NodeId>> cand(coarse.size());
    for (std::size_t k = 0; k < fine.size(); ++k) {
        for (std::size_t c = 0; c < coarse.size(); ++c) {
            const double dx = coarse[c].x - fine[k].x;
            const double dy = coarse[c].y - fine[k].y;
            cand[c] = {dx * dx + dy * dy, static_cast<NodeId>(c)};
        }
        std::partial_sort(cand.begin(), cand.begin() + 3, cand.end());
        kernels::Stencil& s = out[k];
        for (std::size_t t = 0; t < 3; ++t) s.src[t] = cand[t].second;
        if (std::sqrt(cand[0].first) < 1e-12) {
            s.weight = {1.0, 0.0, 0.0};
            continue;
        }
        double total = 0.0;
        for (std::size_t t = 0; t < 3; ++t) {
            s.weight[t] = 1.0 / cand[t].first;
            total += s.weight[t];
        }
        for (double& w : s.weight) w /= total;
    }
    return out;
}

namespace {

LevelGraph make_level(NodeSet nodes, std::vector<NodeId> finest, std::size_t kappa, std::size_t level) {
    LevelGraph g;
    g.nodes = std::move(nodes);
    g.finest = std::move(finest);
    g.edges = build_knn_edges(g.nodes, kappa);
    g.angles = build_angles(g.nodes, g.edges);
    try {
        g.pinv = pinv_blocks(g.edges);
    } catch (const Error& err) {
        throw Error(err.code(), "level " + std::to_string(level + 1) + ": " + err.detail());
    }
    return g;
}

}  // namespace

Hierarchy build_hierarchy(const NodeSet& nodes, std::size_t kappa, std::size_t levels) {
    if (levels < 1) throw Error(ErrorCode::InvalidArgument, "a hierarchy needs at least one level");
    nodes.validate();
    Hierarchy h;
    h.kappa = kappa;
    std::vector<NodeId> identity(nodes.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = static_cast<NodeId>(i);
    h.levels.push_back(make_level(nodes, std::move(identity), kappa, 0));
    h.child_index.emplace_back();
    h.pool_angles.emplace_back();

    for (std::size_t l = 1; l < levels; ++l) {
        const LevelGraph& fine = h.levels.back();
        std::vector<NodeId> kept = guillard_coarsen(fine.nodes.size(), fine.edges);
        if (kept.size() <= kappa) {
            throw Error(ErrorCode::HierarchyTooDeep, "level " + std::to_string(l + 1) + " would keep " +
                                                         std::to_string(kept.size()) + " nodes, need more than " +
                                                         std::to_string(kappa));
        }
        std::vector<NodeId> finest(kept.size());
        for (std::size_t c = 0; c < kept.size(); ++c) finest[c] = fine.finest[kept[c]];
        LevelGraph coarse = make_level(fine.nodes.subset(kept), std::move(finest), kappa, l);
        // `fine` may dangle after push_back; build cross-level data first.
        AngleSet pool = build_pool_angles(fine.nodes, fine.edges, coarse.nodes, coarse.edges, kept);
        h.interp.push_back(interp_weights(fine.nodes.coords, coarse.nodes.coords));
        h.levels.push_back(std::move(coarse));
        h.child_index.push_back(std::move(kept));
        h.pool_angles.push_back(std::move(pool));
    }
    h.interp.emplace_back();
    return h;
}

nlohmann::json summarize(const Hierarchy& h) {
    nlohmann::json out;
    out["kappa"] = h.kappa;
    out["levels"] = nlohmann::json::array();
    for (std::size_t l = 0; l < h.levels.size(); ++l) {
        const LevelGraph& g = h.levels[l];
        std::vector<std::size_t> out_degree(g.nodes.size(), 0);
        for (const Edge& e : g.edges.edges) ++out_degree[e.src];
        std::map<std::size_t, std::size_t> out_hist;
        for (std::size_t d : out_degree) ++out_hist[d];
        nlohmann::json in_hist = nlohmann::json::object();
        in_hist[std::to_string(h.kappa)] = g.nodes.size();
        nlohmann::json oh = nlohmann::json::object();
        for (auto [d, c] : out_hist) oh[std::to_string(d)] = c;

        std::size_t dirichlet = 0;
        for (auto f : g.nodes.dirichlet) dirichlet += f;
        nlohmann::json level = {
            {"level", l + 1},
            {"nodes", g.nodes.size()},
            {"dirichlet_nodes", dirichlet},
            {"edges", g.edges.size()},
            {"angles", g.angles.size()},
            {"in_degree_histogram", in_hist},
            {"out_degree_histogram", oh},
            {"min_sigma", g.pinv.min_conditioning()},
        };
        if (l > 0) {
            level["pool_angles"] = h.pool_angles[l].size();
            level["coarsening_ratio"] =
                static_cast<double>(g.nodes.size()) / static_cast<double>(h.levels[l - 1].nodes.size());
        }
        out["levels"].push_back(level);
    }
    return out;
}

}  // namespace remus
