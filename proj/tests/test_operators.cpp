// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "remus/error.hpp"
#include "remus/hierarchy.hpp"
#include "remus/operators.hpp"
#include "support.hpp"

using namespace remus;

namespace {

using Directions = Eigen::Matrix<double, Eigen::Dynamic, 2>;

Directions random_directions(std::mt19937_64& rng, int kappa) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    Directions e(kappa, 2);
    for (int m = 0; m < kappa; ++m) {
        const double a = angle(rng);
        e(m, 0) = std::cos(a);
        e(m, 1) = std::sin(a);
    }
    return e;
}

// (E^T E)^{-1} E^T with the 2x2 inverse written out by hand.
Eigen::Matrix<double, 2, Eigen::Dynamic> normal_equations(const Directions& e) {
    double g00 = 0, g01 = 0, g11 = 0;
    for (int m = 0; m < e.rows(); ++m) {
        g00 += e(m, 0) * e(m, 0);
        g01 += e(m, 0) * e(m, 1);
        g11 += e(m, 1) * e(m, 1);
    }
    const double det = g00 * g11 - g01 * g01;
    const double i00 = g11 / det, i01 = -g01 / det, i11 = g00 / det;
    Eigen::Matrix<double, 2, Eigen::Dynamic> p(2, e.rows());
    for (int m = 0; m < e.rows(); ++m) {
        p(0, m) = i00 * e(m, 0) + i01 * e(m, 1);
        p(1, m) = i01 * e(m, 0) + i11 * e(m, 1);
    }
    return p;
}

}  // namespace

TEST_CASE("pinv matches the hand-solved normal equations") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 500; ++trial) {
        const int kappa = 2 + trial % 8;
        const Directions e = random_directions(rng, kappa);
        const SmallPinv p = moore_penrose_pinv(e);
        if (p.rank < 2) continue;
        const auto ref = normal_equations(e);
        const double scale = ref.cwiseAbs().maxCoeff();
        CHECK((p.matrix - ref).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    }
}

TEST_CASE("pinv of a full-rank direction set is a left inverse") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const Directions e = random_directions(rng, 5);
        const SmallPinv p = moore_penrose_pinv(e);
        REQUIRE(p.rank == 2);
        const Eigen::Matrix2d id = p.matrix * e;
        CHECK((id - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        // sigma_min against the eigenvalues of E^T E.
        const Eigen::Matrix2d g = e.transpose() * e;
        const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(g).eigenvalues()(0);
        CHECK(p.sigma_min == doctest::Approx(std::sqrt(lmin)).epsilon(1e-10));
    }
}

TEST_CASE("pinv of rank-deficient sets") {
    // Rank one: E = a v^T has pinv v a^T / |a|^2.
    Eigen::Vector2d v(0.6, 0.8);
    Eigen::VectorXd a(4);
    a << 1.0, -2.0, 0.5, 3.0;
    const Directions e = a * v.transpose();
    const SmallPinv p = moore_penrose_pinv(e);
    CHECK(p.rank == 1);
    const Eigen::MatrixXd ref = v * a.transpose() / a.squaredNorm();
    CHECK((p.matrix - ref).cwiseAbs().maxCoeff() < 1e-12);

    const SmallPinv z = moore_penrose_pinv(Directions::Zero(3, 2));
    CHECK(z.rank == 0);
    CHECK(z.matrix.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pinv_blocks rejects collinear neighborhoods") {
    NodeSet line;
    for (int i = 0; i < 12; ++i) {
        line.coords.push_back({0.1 * i + 0.001 * i * i, 0.0});
        line.dirichlet.push_back(0);
        line.param.push_back(0.0);
    }
    const EdgeSet edges = build_knn_edges(line, 3);
    try {
        pinv_blocks(edges);
        FAIL("expected DegenerateDirections");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateDirections);
        CHECK(std::string(e.what()).find("node 0") != std::string::npos);
    }
}

TEST_CASE("property: projection then aggregation recovers the field") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const NodeSet nodes = test::random_nodes(seed, 200);
        const EdgeSet edges = build_knn_edges(nodes, 5);
        const PinvTable pinv = pinv_blocks(edges);
        const std::vector<Vec2> field = test::random_vectors(seed + 99, nodes.size());
        const std::vector<double> proj = project_field(edges, field);
        for (NodeId j = 0; j < nodes.size(); ++j) {
            const Vec2 back = aggregate_scalars(pinv.block(j), std::span(proj).subspan(j * 5, 5));
            CHECK(std::abs(back.x - field[j].x) < 1e-10);
            CHECK(std::abs(back.y - field[j].y) < 1e-10);
        }
    }
}

TEST_CASE("property: pinv blocks rotate covariantly") {
    const NodeSet nodes = test::random_nodes(5, 150);
    const Rotation r = Rotation::from_angle(2.1);
    const PinvTable a = pinv_blocks(build_knn_edges(nodes, 5));
    const PinvTable b = pinv_blocks(build_knn_edges(nodes.transformed(r), 5));
    const Eigen::Matrix2d rm{{r.m[0], r.m[1]}, {r.m[2], r.m[3]}};
    for (NodeId j = 0; j < nodes.size(); ++j) {
        const Eigen::MatrixXd expected = rm * a.block(j).matrix();
        CHECK((b.block(j).matrix() - expected).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(b.sigma_min[j] == doctest::Approx(a.sigma_min[j]).epsilon(1e-10));
    }
}

TEST_CASE("aggregate_features equals a per-column loop over aggregate_scalars") {
    const NodeSet nodes = test::random_nodes(8, 120);
    const EdgeSet edges = build_knn_edges(nodes, 5);
    const PinvTable pinv = pinv_blocks(edges);
    const Matrix feats = test::random_matrix(3, static_cast<Eigen::Index>(edges.size()), 7);
    const Matrix w = aggregate_features(pinv, feats);
    REQUIRE(w.rows() == static_cast<Eigen::Index>(nodes.size()));
    REQUIRE(w.cols() == 14);
    for (NodeId j = 0; j < nodes.size(); ++j) {
        const auto wj = node_feature_matrix(w, j);
        for (int f = 0; f < 7; ++f) {
            std::vector<double> col(5);
            for (int m = 0; m < 5; ++m) col[m] = feats(j * 5 + m, f);
            const Vec2 ref = aggregate_scalars(pinv.block(j), col);
            CHECK(std::abs(wj(0, f) - ref.x) < 1e-13);
            CHECK(std::abs(wj(1, f) - ref.y) < 1e-13);
        }
    }
}

TEST_CASE("project_features equals e_lk W_k per edge") {
    const NodeSet nodes = test::random_nodes(9, 80);
    const EdgeSet edges = build_knn_edges(nodes, 4);
    const Matrix w = test::random_matrix(4, static_cast<Eigen::Index>(nodes.size()), 10);
    const Matrix out = project_features(edges, w);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto wk = node_feature_matrix(w, edges.edges[e].dst);
        for (int f = 0; f < 5; ++f) {
            const double ref = edges.unit[e].x * wk(0, f) + edges.unit[e].y * wk(1, f);
            CHECK(std::abs(out(static_cast<Eigen::Index>(e), f) - ref) < 1e-13);
        }
    }
}

TEST_CASE("project_features inverts aggregate_features on projected vector fields") {
    // For features that are projections of per-node vectors, aggregate then
    // project reproduces them exactly.
    const NodeSet nodes = test::random_nodes(10, 100);
    const EdgeSet edges = build_knn_edges(nodes, 5);
    const PinvTable pinv = pinv_blocks(edges);
    const std::vector<Vec2> field = test::random_vectors(1, nodes.size());
    const std::vector<double> proj = project_field(edges, field);
    const Matrix feats = Eigen::Map<const Matrix>(proj.data(), static_cast<Eigen::Index>(proj.size()), 1);
    const Matrix back = project_features(edges, aggregate_features(pinv, feats));
    CHECK(test::max_abs(back - feats) < 1e-10);
}

TEST_CASE("interpolate_rows equals the stencil sum") {
    const NodeSet fine = test::random_nodes(12, 90);
    const NodeSet coarse = test::random_nodes(13, 20);
    const auto stencils = interp_weights(fine.coords, coarse.coords);
    const Matrix c = test::random_matrix(5, 20, 6);
    const Matrix f = interpolate_rows(stencils, c);
    for (std::size_t k = 0; k < fine.size(); ++k) {
        for (int col = 0; col < 6; ++col) {
            double ref = 0.0;
            for (int t = 0; t < 3; ++t) ref += stencils[k].weight[t] * c(stencils[k].src[t], col);
            CHECK(std::abs(f(static_cast<Eigen::Index>(k), col) - ref) < 1e-14);
        }
    }
}
