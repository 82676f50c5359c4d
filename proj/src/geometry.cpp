// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "remus/error.hpp"
#include "remus/kernels.hpp"

namespace remus {

Rotation Rotation::from_angle(double radians, Vec2 translation) {
    const double c = std::cos(radians);
    const double s = std::sin(radians);
    return Rotation{{c, -s, s, c}, translation};
}

Rotation Rotation::inverse() const {
    Rotation inv;
    inv.m = {m[0], m[2], m[1], m[3]};
    const Vec2 back = inv.rotate(t);
    inv.t = {-back.x, -back.y};
    return inv;
}

void NodeSet::validate() const {
    if (dirichlet.size() != coords.size() || param.size() != coords.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "node set has " + std::to_string(coords.size()) + " coordinates but " +
                        std::to_string(dirichlet.size()) + " dirichlet flags and " +
                        std::to_string(param.size()) + " parameter values");
    }
    for (std::size_t i = 0; i < coords.size(); ++i) {
        if (!std::isfinite(coords[i].x) || !std::isfinite(coords[i].y)) {
            throw Error(ErrorCode::InvalidArgument, "non-finite coordinate at node " + std::to_string(i));
        }
    }
}

NodeSet NodeSet::transformed(const Rotation& r) const {
    NodeSet out = *this;
    for (auto& p : out.coords) p = r.apply(p);
    return out;
}

NodeSet NodeSet::subset(std::span<const NodeId> ids) const {
    NodeSet out;
    out.coords.reserve(ids.size());
    out.dirichlet.reserve(ids.size());
    out.param.reserve(ids.size());
    for (NodeId id : ids) {
        out.coords.push_back(coords[id]);
        out.dirichlet.push_back(dirichlet[id]);
        out.param.push_back(param[id]);
    }
    return out;
}

std::vector<NodeId> EdgeSet::incoming(NodeId dst) const {
    std::vector<NodeId> out(kappa);
    for (std::size_t m = 0; m < kappa; ++m) out[m] = edges[edge_id(dst, m)].src;
    return out;
}

namespace {

void check_unique(std::span<const Vec2> coords) {
    std::vector<NodeId> order(coords.size());
    std::iota(order.begin(), order.end(), NodeId{0});
    std::sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        if (coords[a].x != coords[b].x) return coords[a].x < coords[b].x;
        if (coords[a].y != coords[b].y) return coords[a].y < coords[b].y;
        return a < b;
    });
    for (std::size_t r = 1; r < order.size(); ++r) {
        if (coords[order[r]] == coords[order[r - 1]]) {
            throw Error(ErrorCode::DuplicateNodes, "nodes " + std::to_string(order[r - 1]) + " and " +
                                                       std::to_string(order[r]) + " share coordinates");
        }
    }
}

}  // namespace

EdgeSet build_knn_edges(const NodeSet& nodes, std::size_t kappa) {
    if (kappa < 2) throw Error(ErrorCode::InvalidArgument, "kappa must be at least 2");
    const std::size_t n = nodes.size();
    if (n <= kappa) {
        throw Error(ErrorCode::TooFewNodes,
                    std::to_string(n) + " nodes cannot give " + std::to_string(kappa) + " incoming edges each");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(nodes.coords[i].x) || !std::isfinite(nodes.coords[i].y)) {
            throw Error(ErrorCode::InvalidArgument, "non-finite coordinate at node " + std::to_string(i));
        }
    }
    check_unique(nodes.coords);

    std::vector<NodeId> sources(n * kappa);
    kernels::active::knn_sources(nodes.coords, kappa, sources);

    EdgeSet out;
    out.kappa = kappa;
    out.edges.resize(n * kappa);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t m = 0; m < kappa; ++m) {
            out.edges[j * kappa + m] = Edge{sources[j * kappa + m], static_cast<NodeId>(j)};
        }
    }
    out.unit = unit_vectors(nodes, out.edges);
    return out;
}

std::vector<Vec2> unit_vectors(const NodeSet& nodes, std::span<const Edge> edges) {
    std::vector<Vec2> out(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Vec2 d = nodes.coords[edges[e].dst] - nodes.coords[edges[e].src];
        const double len = norm(d);
        if (!(len > 0.0)) {
            throw Error(ErrorCode::DegenerateEdge, "edge " + std::to_string(edges[e].src) + "->" +
                                                       std::to_string(edges[e].dst) + " has zero length");
        }
        out[e] = {d.x / len, d.y / len};
    }
    return out;
}

std::array<double, 4> angle_attributes(Vec2 xi, Vec2 xj, Vec2 xk) {
    const Vec2 a = xj - xi;
    const Vec2 b = xk - xj;
    const double la = norm(a);
    const double lb = norm(b);
    const Vec2 ua{a.x / la, a.y / la};
    const Vec2 ub{b.x / lb, b.y / lb};
    return {la, lb, dot(ua, ub), cross(ua, ub)};
}

AngleSet build_angles(const NodeSet& nodes, const EdgeSet& edges) {
    const std::size_t kappa = edges.kappa;
    AngleSet out;
    out.kappa = kappa;
    const std::size_t count = edges.size() * kappa;
    out.triples.resize(count);
    out.attrs.resize(count);
    out.in_edge.resize(count);
    out.out_edge.resize(count);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const NodeId j = edges.edges[e].src;
        const NodeId k = edges.edges[e].dst;
        for (std::size_t m = 0; m < kappa; ++m) {
            const std::size_t in = edges.edge_id(j, m);
            const NodeId i = edges.edges[in].src;
            const std::size_t a = e * kappa + m;
            out.triples[a] = {i, j, k};
            out.attrs[a] = angle_attributes(nodes.coords[i], nodes.coords[j], nodes.coords[k]);
            out.in_edge[a] = static_cast<std::uint32_t>(in);
            out.out_edge[a] = static_cast<std::uint32_t>(e);
        }
    }
    return out;
}

AngleSet build_pool_angles(const NodeSet& fine_nodes, const EdgeSet& fine_edges, const NodeSet& coarse_nodes,
                           const EdgeSet& coarse_edges, std::span<const NodeId> coarse_to_fine) {
    (void)coarse_nodes;
    const std::size_t kappa = fine_edges.kappa;
    AngleSet out;
    out.kappa = kappa;
    const std::size_t count = coarse_edges.size() * kappa;
    out.triples.resize(count);
    out.attrs.resize(count);
    out.in_edge.resize(count);
    out.out_edge.resize(count);
    for (std::size_t e = 0; e < coarse_edges.size(); ++e) {
        const NodeId j = coarse_to_fine[coarse_edges.edges[e].src];
        const NodeId k = coarse_to_fine[coarse_edges.edges[e].dst];
        for (std::size_t m = 0; m < kappa; ++m) {
            const std::size_t in = fine_edges.edge_id(j, m);
            const NodeId i = fine_edges.edges[in].src;
            const std::size_t a = e * kappa + m;
            out.triples[a] = {i, j, k};
            out.attrs[a] = angle_attributes(fine_nodes.coords[i], fine_nodes.coords[j], fine_nodes.coords[k]);
            out.in_edge[a] = static_cast<std::uint32_t>(in);
            out.out_edge[a] = static_cast<std::uint32_t>(e);
        }
    }
    return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> incoming_direction_matrix(const EdgeSet& edges, NodeId j) {
    Eigen::Matrix<double, Eigen::Dynamic, 2> m(edges.kappa, 2);
    for (std::size_t s = 0; s < edges.kappa; ++s) {
        const Vec2 u = edges.unit[edges.edge_id(j, s)];
        m(s, 0) = u.x;
        m(s, 1) = u.y;
    }
    return m;
}

namespace {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view field, std::size_t offset) {
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && (last[-1] == ' ' || last[-1] == '\r')) --last;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw Error(ErrorCode::ParseError,
                    "bad number '" + std::string(field) + "' at byte offset " + std::to_string(offset));
    }
    return v;
}

}  // namespace

NodeSet load_nodes_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();

    NodeSet nodes;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string::npos) eol = text.size();
        std::string_view line(text.data() + pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::size_t line_offset = pos;
        pos = eol + 1;
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line != "x,y,omega") {
                throw Error(ErrorCode::ParseError, "expected header 'x,y,omega' at byte offset 0");
            }
            continue;
        }
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
            throw Error(ErrorCode::ParseError, "expected 3 fields at byte offset " + std::to_string(line_offset));
        }
        const double x = parse_double(line.substr(0, c1), line_offset);
        const double y = parse_double(line.substr(c1 + 1, c2 - c1 - 1), line_offset + c1 + 1);
        const double omega = parse_double(line.substr(c2 + 1), line_offset + c2 + 1);
        if (omega != 0.0 && omega != 1.0) {
            throw Error(ErrorCode::ParseError, "omega must be 0 or 1 at byte offset " + std::to_string(line_offset));
        }
        nodes.coords.push_back({x, y});
        nodes.dirichlet.push_back(omega == 1.0 ? 1 : 0);
        nodes.param.push_back(0.0);
    }
    if (header) throw Error(ErrorCode::ParseError, "empty node file " + path.string());
    return nodes;
}

void save_nodes_csv(const std::filesystem::path& path, const NodeSet& nodes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out << "x,y,omega\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        out << format_double(nodes.coords[i].x) << ',' << format_double(nodes.coords[i].y) << ','
            << static_cast<int>(nodes.dirichlet[i]) << '\n';
    }
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace remus
