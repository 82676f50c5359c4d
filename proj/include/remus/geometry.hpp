// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace remus {

using NodeId = std::uint32_t;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
/// z-component of the 2-D cross product.
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

static_assert(sizeof(Vec2) == 2 * sizeof(double), "Vec2 arrays are viewed as n x 2 doubles");

/// Proper rotation (det +1) with an optional translation: x -> R x + t.
struct Rotation {
    std::array<double, 4> m{1.0, 0.0, 0.0, 1.0};  // row-major 2x2
    Vec2 t{};

    static Rotation from_angle(double radians, Vec2 translation = {});

    Vec2 rotate(Vec2 v) const { return {m[0] * v.x + m[1] * v.y, m[2] * v.x + m[3] * v.y}; }
    Vec2 apply(Vec2 p) const { return rotate(p) + t; }
    Rotation inverse() const;
};

/// Discretized domain: coordinates, Dirichlet flags and a per-node scalar parameter.
struct NodeSet {
    std::vector<Vec2> coords;
    std::vector<std::uint8_t> dirichlet;
    std::vector<double> param;

    std::size_t size() const { return coords.size(); }
    /// Throws InvalidArgument when lengths disagree or a coordinate is not finite.
    void validate() const;
    NodeSet transformed(const Rotation& r) const;
    NodeSet subset(std::span<const NodeId> ids) const;
};

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
};

/// Directed k-NN edges. Edges are stored destination-major: the kappa
/// incoming edges of node j occupy indices [j*kappa, (j+1)*kappa), ordered by
/// ascending distance then ascending source index.
struct EdgeSet {
    std::size_t kappa = 0;
    std::vector<Edge> edges;
    std::vector<Vec2> unit;  // e_ij = (x_j - x_i) / |x_j - x_i|

    std::size_t size() const { return edges.size(); }
    std::size_t node_count() const { return kappa == 0 ? 0 : edges.size() / kappa; }
    std::size_t edge_id(NodeId dst, std::size_t slot) const { return dst * kappa + slot; }
    /// Source ids of the incoming edges of `dst` in edge order.
    std::vector<NodeId> incoming(NodeId dst) const;
};

/// Directed angles (i,j,k) with (i,j) an incoming edge of j and (j,k) an
/// edge out of j. Stored outgoing-edge-major: the kappa angles ending in
/// edge e occupy [e*kappa, (e+1)*kappa).
struct AngleSet {
    std::size_t kappa = 0;
    std::vector<std::array<NodeId, 3>> triples;
    /// [|x_j - x_i|, |x_k - x_j|, cos(alpha), sin(alpha)]
    std::vector<std::array<double, 4>> attrs;
    std::vector<std::uint32_t> in_edge;   // index of (i,j) in its EdgeSet
    std::vector<std::uint32_t> out_edge;  // index of (j,k) in its EdgeSet

    std::size_t size() const { return triples.size(); }
};

/// Exact k-NN graph in which every node has exactly `kappa` incoming edges.
/// Throws TooFewNodes when nodes.size() <= kappa, DuplicateNodes when two
/// coordinates coincide, InvalidArgument when kappa < 2.
EdgeSet build_knn_edges(const NodeSet& nodes, std::size_t kappa);

/// Unit edge vectors; throws DegenerateEdge on coincident endpoints.
std::vector<Vec2> unit_vectors(const NodeSet& nodes, std::span<const Edge> edges);

/// Geometric attributes of the directed angle (i,j,k); alpha is the signed
/// counterclockwise angle from e_ij to e_jk.
std::array<double, 4> angle_attributes(Vec2 xi, Vec2 xj, Vec2 xk);

/// All angles A = {(i,j,k) | (i,j),(j,k) in E}.
AngleSet build_angles(const NodeSet& nodes, const EdgeSet& edges);

/// Angles joining the incoming fine edges of j to every coarse edge (j,k).
/// `coarse_to_fine` maps coarse node ids to their ids in the fine node set.
AngleSet build_pool_angles(const NodeSet& fine_nodes, const EdgeSet& fine_edges,
                           const NodeSet& coarse_nodes, const EdgeSet& coarse_edges,
                           std::span<const NodeId> coarse_to_fine);

/// kappa x 2 matrix whose rows are the incoming unit vectors of node j.
Eigen::Matrix<double, Eigen::Dynamic, 2> incoming_direction_matrix(const EdgeSet& edges, NodeId j);

/// Reads `x,y,omega` rows; param is set to zero for every node.
NodeSet load_nodes_csv(const std::filesystem::path& path);
void save_nodes_csv(const std::filesystem::path& path, const NodeSet& nodes);

}  // namespace remus
