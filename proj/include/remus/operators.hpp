// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Rotation-aware kernels: projection of vectors onto incoming edge directions,
// the Moore-Penrose projection-aggregation that inverts it, and the
// node-feature matrices W_j (2 x F) used by edge-unpooling.
//
// A node-feature table with F features is stored as an n x 2F matrix whose
// row j is [W_j(0, 0..F) | W_j(1, 0..F)].

#pragma once

#include <span>
#include <vector>

#include "remus/geometry.hpp"
#include "remus/kernels.hpp"
#include "remus/matrix.hpp"

namespace remus {

/// Incoming direction sets with smallest singular value at or below this are degenerate.
inline constexpr double kRankTolerance = 1e-8;

/// [e_{1:kappa,j}]^+ for one node, 2 x kappa row-major, plus its conditioning.
struct PinvBlock {
    std::span<const double> data;
    std::size_t kappa = 0;
    double conditioning = 0.0;  // smallest singular value of the direction matrix

    Eigen::Map<const Eigen::Matrix<double, 2, Eigen::Dynamic, Eigen::RowMajor>> matrix() const {
        return {data.data(), 2, static_cast<Eigen::Index>(kappa)};
    }
};

/// Pseudoinverse blocks of every node of one level.
struct PinvTable {
    std::size_t kappa = 0;
    std::vector<double> data;       // nodes x 2 x kappa
    std::vector<double> sigma_min;  // per node

    std::size_t nodes() const { return sigma_min.size(); }
    PinvBlock block(NodeId j) const {
        return {std::span<const double>(data).subspan(j * 2 * kappa, 2 * kappa), kappa, sigma_min[j]};
    }
    double min_conditioning() const;
};

struct SmallPinv {
    Eigen::Matrix<double, 2, Eigen::Dynamic> matrix;
    double sigma_min = 0.0;
    int rank = 0;
};

/// Moore-Penrose pseudoinverse of a kappa x 2 matrix. Uses the normal
/// equations when sigma_min > tolerance, otherwise the rank-revealing
/// eigen-decomposition of E^T E (rank 1 or 0). Never throws.
SmallPinv moore_penrose_pinv(const Eigen::Matrix<double, Eigen::Dynamic, 2>& directions,
                             double tolerance = kRankTolerance);

/// u_ij = e_ij . field[j] for every edge.
std::vector<double> project_field(const EdgeSet& edges, std::span<const Vec2> field);

/// Throws DegenerateDirections naming the first node whose incoming directions
/// have sigma_min <= tolerance.
PinvTable pinv_blocks(const EdgeSet& edges, double tolerance = kRankTolerance);

/// rho(values) = [e]^+ values
Vec2 aggregate_scalars(const PinvBlock& pinv, std::span<const double> values);

/// Column f of W_j is rho applied to feature f of the kappa incoming edges of j.
/// edge_features is |E| x F; the result is n x 2F.
Matrix aggregate_features(const PinvTable& pinv, const Matrix& edge_features);

/// w_lk = e_lk W_k for every edge; W is n x 2F, the result |E| x F.
Matrix project_features(const EdgeSet& edges, const Matrix& node_features);

/// Weighted three-point interpolation of node rows from a coarse to a fine node set.
Matrix interpolate_rows(std::span<const kernels::Stencil> stencils, const Matrix& coarse);

/// W_j as a 2 x F matrix.
Eigen::Matrix<double, 2, Eigen::Dynamic> node_feature_matrix(const Matrix& node_features, NodeId j);

}  // namespace remus
