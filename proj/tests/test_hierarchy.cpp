// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include "doctest.h"
#include "remus/data.hpp"
#include "remus/error.hpp"
#include "remus/hierarchy.hpp"
#include "support.hpp"

using namespace remus;

namespace {

std::vector<std::set<NodeId>> undirected(const EdgeSet& edges, std::size_t n) {
    std::vector<std::set<NodeId>> adj(n);
    for (const Edge& e : edges.edges) {
        adj[e.src].insert(e.dst);
        adj[e.dst].insert(e.src);
    }
    return adj;
}

// Greedy independent set in ascending index order with explicit adjacency sets.
std::vector<NodeId> greedy_mis(const std::vector<std::set<NodeId>>& adj) {
    std::vector<int> state(adj.size(), 0);  // 0 open, 1 kept, 2 removed
    std::vector<NodeId> kept;
    for (NodeId i = 0; i < adj.size(); ++i) {
        if (state[i] != 0) continue;
        state[i] = 1;
        kept.push_back(i);
        for (NodeId k : adj[i]) {
            if (state[k] == 0) state[k] = 2;
        }
    }
    return kept;
}

}  // namespace

TEST_CASE("guillard coarsening matches the greedy oracle and is a maximal independent set") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const NodeSet nodes = test::random_nodes(seed, 100 + 13 * seed);
        const EdgeSet edges = build_knn_edges(nodes, 5);
        const auto adj = undirected(edges, nodes.size());
        const std::vector<NodeId> kept = guillard_coarsen(nodes.size(), edges);
        CHECK(kept == greedy_mis(adj));
        std::vector<char> in(nodes.size(), 0);
        for (NodeId k : kept) in[k] = 1;
        for (NodeId i = 0; i < nodes.size(); ++i) {
            bool has_kept_neighbor = false;
            for (NodeId k : adj[i]) {
                if (in[k]) has_kept_neighbor = true;
                if (in[i]) CHECK_FALSE(in[k]);
            }
            if (!in[i]) CHECK(has_kept_neighbor);
        }
    }
}

TEST_CASE("interpolation weights match the brute-force three nearest neighbors") {
    const NodeSet fine = test::random_nodes(1, 150);
    const NodeSet coarse = test::random_nodes(2, 30);
    const auto stencils = interp_weights(fine.coords, coarse.coords);
    REQUIRE(stencils.size() == fine.size());
    for (std::size_t k = 0; k < fine.size(); ++k) {
        std::vector<std::pair<double, NodeId>> cand;
        for (NodeId c = 0; c < coarse.size(); ++c) {
            const Vec2 d = coarse.coords[c] - fine.coords[k];
            cand.push_back({dot(d, d), c});
        }
        std::sort(cand.begin(), cand.end());
        double total = 0.0;
        for (int t = 0; t < 3; ++t) total += 1.0 / cand[t].first;
        for (int t = 0; t < 3; ++t) {
            CHECK(stencils[k].src[t] == cand[t].second);
            CHECK(stencils[k].weight[t] == doctest::Approx((1.0 / cand[t].first) / total).epsilon(1e-12));
        }
    }
}

TEST_CASE("a coincident coarse node takes the full interpolation weight") {
    const NodeSet coarse = test::random_nodes(3, 10);
    const std::vector<Vec2> fine{coarse.coords[4]};
    const auto s = interp_weights(fine, coarse.coords);
    CHECK(s[0].src[0] == 4);
    CHECK(s[0].weight[0] == 1.0);
    CHECK(s[0].weight[1] == 0.0);
    CHECK(s[0].weight[2] == 0.0);
}

TEST_CASE("hierarchy levels are nested and consistent") {
    const Sample s = generate_synthetic(4, 1500, 2, "taylor-green");
    const Hierarchy h = build_hierarchy(s.nodes, 5, 3);
    REQUIRE(h.depth() == 3);
    CHECK(h.interp.size() == 3);
    CHECK(h.interp[2].empty());
    for (std::size_t l = 1; l < 3; ++l) {
        const LevelGraph& fine = h.levels[l - 1];
        const LevelGraph& coarse = h.levels[l];
        CHECK(coarse.nodes.size() < fine.nodes.size());
        CHECK(h.interp[l - 1].size() == fine.nodes.size());
        for (NodeId c = 0; c < coarse.nodes.size(); ++c) {
            const NodeId f = h.child_index[l][c];
            CHECK(coarse.nodes.coords[c] == fine.nodes.coords[f]);
            CHECK(coarse.finest[c] == fine.finest[f]);
            CHECK(coarse.nodes.dirichlet[c] == fine.nodes.dirichlet[f]);
        }
        const AngleSet& pool = h.pool_angles[l];
        CHECK(pool.size() == coarse.edges.size() * 5);
        for (std::size_t a = 0; a < pool.size(); ++a) {
            const auto [i, j, k] = pool.triples[a];
            const Edge in = fine.edges.edges[pool.in_edge[a]];
            const Edge out = coarse.edges.edges[pool.out_edge[a]];
            CHECK(in.src == i);
            CHECK(in.dst == j);
            CHECK(h.child_index[l][out.src] == j);
            CHECK(h.child_index[l][out.dst] == k);
            const auto ref = angle_attributes(fine.nodes.coords[i], fine.nodes.coords[j], fine.nodes.coords[k]);
            for (int c = 0; c < 4; ++c) CHECK(pool.attrs[a][c] == ref[c]);
        }
    }
}

TEST_CASE("too many levels for the node count") {
    const Sample s = generate_synthetic(5, 10, 2, "rotating-rigid");
    try {
        build_hierarchy(s.nodes, 5, 5);
        FAIL("expected HierarchyTooDeep");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HierarchyTooDeep);
    }
}

TEST_CASE("summary reports per-level sizes") {
    const Sample s = generate_synthetic(6, 800, 2, "advected-vortex");
    const Hierarchy h = build_hierarchy(s.nodes, 5, 2);
    const nlohmann::json j = summarize(h);
    CHECK(j["kappa"] == 5);
    REQUIRE(j["levels"].size() == 2);
    CHECK(j["levels"][0]["nodes"] == 800);
    CHECK(j["levels"][0]["edges"] == 4000);
    CHECK(j["levels"][0]["angles"] == 20000);
    CHECK(j["levels"][1]["nodes"] == h.levels[1].nodes.size());
    CHECK(j["levels"][1]["min_sigma"].get<double>() > kRankTolerance);
    std::size_t total = 0;
    for (const auto& [deg, count] : j["levels"][0]["out_degree_histogram"].items()) {
        total += std::stoul(deg) * count.get<std::size_t>();
    }
    CHECK(total == 4000);
}
