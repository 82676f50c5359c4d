// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "remus/error.hpp"

namespace remus {

double PinvTable::min_conditioning() const {
    double m = std::numeric_limits<double>::infinity();
    for (double s : sigma_min) m = std::min(m, s);
    return m;
}

SmallPinv moore_penrose_pinv(const Eigen::Matrix<double, Eigen::Dynamic, 2>& e, double tolerance) {
    const Eigen::Index k = e.rows();
    double g00 = 0.0, g01 = 0.0, g11 = 0.0, det = 0.0;
    for (Eigen::Index m = 0; m < k; ++m) {
        g00 += e(m, 0) * e(m, 0);
        g01 += e(m, 0) * e(m, 1);
        g11 += e(m, 1) * e(m, 1);
    }
    // Cauchy-Binet keeps det(E^T E) accurate for nearly collinear rows.
    for (Eigen::Index m = 0; m < k; ++m) {
        for (Eigen::Index n = m + 1; n < k; ++n) {
            const double c = e(m, 0) * e(n, 1) - e(n, 0) * e(m, 1);
            det += c * c;
        }
    }
    const double half_gap = std::sqrt(0.25 * (g00 - g11) * (g00 - g11) + g01 * g01);
    const double lambda_max = 0.5 * (g00 + g11) + half_gap;
    const double lambda_min = lambda_max > 0.0 ? det / lambda_max : 0.0;

    SmallPinv out;
    out.sigma_min = std::sqrt(std::max(lambda_min, 0.0));
    out.matrix.setZero(2, k);
    if (out.sigma_min > tolerance) {
        Eigen::Matrix2d inv;
        inv << g11 / det, -g01 / det, -g01 / det, g00 / det;
        out.matrix = inv * e.transpose();
        out.rank = 2;
        return out;
    }
    if (std::sqrt(lambda_max) > tolerance) {
        // Unit eigenvector of the dominant eigenvalue of E^T E.
        Eigen::Vector2d v;
        if (std::abs(g01) > 0.0) {
            v << lambda_max - g11, g01;
        } else if (g00 >= g11) {
            v << 1.0, 0.0;
        } else {
            v << 0.0, 1.0;
        }
        v.normalize();
        out.matrix = (v * v.transpose() / lambda_max) * e.transpose();
        out.rank = 1;
    }
    return out;
}

std::vector<double> project_field(const EdgeSet& edges, std::span<const Vec2> field) {
    if (field.size() != edges.node_count()) {
        throw Error(ErrorCode::InvalidArgument, "field has " + std::to_string(field.size()) + " vectors for " +
                                                    std::to_string(edges.node_count()) + " nodes");
    }
    std::vector<double> out(edges.size());
    kernels::active::project_vectors(edges.unit, edges.kappa, reinterpret_cast<const double*>(field.data()), out.data());
    return out;
}

PinvTable pinv_blocks(const EdgeSet& edges, double tolerance) {
    if (edges.kappa < 2) throw Error(ErrorCode::InvalidArgument, "kappa must be at least 2");
    const std::size_t n = edges.node_count();
    const std::size_t kappa = edges.kappa;
    PinvTable table;
    table.kappa = kappa;
    table.data.resize(n * 2 * kappa);
    table.sigma_min.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const SmallPinv p = moore_penrose_pinv(incoming_direction_matrix(edges, static_cast<NodeId>(j)), tolerance);
        if (p.rank < 2) {
            throw Error(ErrorCode::DegenerateDirections,
                        "incoming directions of node " + std::to_string(j) + " are collinear (sigma_min " +
                            std::to_string(p.sigma_min) + ")");
        }
        table.sigma_min[j] = p.sigma_min;
        double* dst = table.data.data() + j * 2 * kappa;
        for (std::size_t m = 0; m < kappa; ++m) {
            dst[m] = p.matrix(0, static_cast<Eigen::Index>(m));
            dst[kappa + m] = p.matrix(1, static_cast<Eigen::Index>(m));
        }
    }
    return table;
}

Vec2 aggregate_scalars(const PinvBlock& pinv, std::span<const double> values) {
    double x = 0.0, y = 0.0;
    for (std::size_t m = 0; m < pinv.kappa; ++m) {
        x += pinv.data[m] * values[m];
        y += pinv.data[pinv.kappa + m] * values[m];
    }
    return {x, y};
}

Matrix aggregate_features(const PinvTable& pinv, const Matrix& edge_features) {
    const std::size_t cols = static_cast<std::size_t>(edge_features.cols());
    Matrix out(static_cast<Eigen::Index>(pinv.nodes()), static_cast<Eigen::Index>(2 * cols));
    kernels::active::apply_pinv(pinv.data, pinv.kappa, pinv.nodes(), edge_features.data(), cols, out.data());
    return out;
}

Matrix project_features(const EdgeSet& edges, const Matrix& node_features) {
    const std::size_t cols = static_cast<std::size_t>(node_features.cols() / 2);
    Matrix out(static_cast<Eigen::Index>(edges.size()), static_cast<Eigen::Index>(cols));
    kernels::active::project_rows(edges.unit, edges.kappa, node_features.data(), cols, out.data());
    return out;
}

Matrix interpolate_rows(std::span<const kernels::Stencil> stencils, const Matrix& coarse) {
    Matrix out(static_cast<Eigen::Index>(stencils.size()), coarse.cols());
    kernels::active::interpolate(stencils, coarse.data(), static_cast<std::size_t>(coarse.cols()), out.data());
    return out;
}

Eigen::Matrix<double, 2, Eigen::Dynamic> node_feature_matrix(const Matrix& node_features, NodeId j) {
    const Eigen::Index cols = node_features.cols() / 2;
    Eigen::Matrix<double, 2, Eigen::Dynamic> w(2, cols);
    w.row(0) = node_features.row(j).head(cols);
    w.row(1) = node_features.row(j).tail(cols);
    return w;
}

}  // namespace remus
