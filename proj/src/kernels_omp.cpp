// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdint>
#include <utility>

#include "remus/kernels.hpp"

namespace remus::kernels::omp {

namespace {
using Index = std::int64_t;
}

void knn_sources(std::span<const Vec2> coords, std::size_t kappa, std::span<NodeId> out) {
    const Index n = static_cast<Index>(coords.size());
#pragma omp parallel
    {
        std::vector<std::pair<double, NodeId>> cand(coords.size() - 1);
#pragma omp for schedule(static)
        for (Index j = 0; j < n; ++j) {
            std::size_t c = 0;
            for (Index i = 0; i < n; ++i) {
                if (i == j) continue;
                const double dx = coords[i].x - coords[j].x;
                const double dy = coords[i].y - coords[j].y;
                cand[c++] = {dx * dx + dy * dy, static_cast<NodeId>(i)};
            }
            std::partial_sort(cand.begin(), cand.begin() + kappa, cand.end());
            for (std::size_t m = 0; m < kappa; ++m) out[j * kappa + m] = cand[m].second;
        }
    }
}

void project_vectors(std::span<const Vec2> unit, std::size_t kappa, const double* field, double* out) {
    const Index edges = static_cast<Index>(unit.size());
#pragma omp parallel for schedule(static)
    for (Index e = 0; e < edges; ++e) {
        const double* u = field + 2 * (e / kappa);
        out[e] = unit[e].x * u[0] + unit[e].y * u[1];
    }
}

void apply_pinv(std::span<const double> pinv, std::size_t kappa, std::size_t nodes, const double* x,
                std::size_t cols, double* out) {
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < static_cast<Index>(nodes); ++j) {
        const double* p = pinv.data() + j * 2 * kappa;
        double* o = out + j * 2 * cols;
        std::fill(o, o + 2 * cols, 0.0);
        for (std::size_t m = 0; m < kappa; ++m) {
            const double* xr = x + (j * kappa + m) * cols;
            const double p0 = p[m];
            const double p1 = p[kappa + m];
            for (std::size_t f = 0; f < cols; ++f) {
                o[f] += p0 * xr[f];
                o[cols + f] += p1 * xr[f];
            }
        }
    }
}

void apply_pinv_adjoint(std::span<const double> pinv, std::size_t kappa, std::size_t nodes, const double* dout,
                        std::size_t cols, double* dx) {
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < static_cast<Index>(nodes); ++j) {
        const double* p = pinv.data() + j * 2 * kappa;
        const double* g = dout + j * 2 * cols;
        for (std::size_t m = 0; m < kappa; ++m) {
            double* d = dx + (j * kappa + m) * cols;
            const double p0 = p[m];
            const double p1 = p[kappa + m];
            for (std::size_t f = 0; f < cols; ++f) d[f] += p0 * g[f] + p1 * g[cols + f];
        }
    }
}

void project_rows(std::span<const Vec2> unit, std::size_t kappa, const double* w, std::size_t cols, double* out) {
    const Index edges = static_cast<Index>(unit.size());
#pragma omp parallel for schedule(static)
    for (Index e = 0; e < edges; ++e) {
        const double* wk = w + (e / kappa) * 2 * cols;
        double* o = out + e * cols;
        const double ux = unit[e].x;
        const double uy = unit[e].y;
        for (std::size_t f = 0; f < cols; ++f) o[f] = ux * wk[f] + uy * wk[cols + f];
    }
}

void project_rows_adjoint(std::span<const Vec2> unit, std::size_t kappa, const double* dout, std::size_t cols,
                          double* dw) {
    // Incoming edges of a node are contiguous, so each node row is owned by one iteration.
    const Index nodes = static_cast<Index>(unit.size() / kappa);
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < nodes; ++k) {
        double* g = dw + k * 2 * cols;
        for (std::size_t m = 0; m < kappa; ++m) {
            const std::size_t e = k * kappa + m;
            const double* d = dout + e * cols;
            const double ux = unit[e].x;
            const double uy = unit[e].y;
            for (std::size_t f = 0; f < cols; ++f) {
                g[f] += ux * d[f];
                g[cols + f] += uy * d[f];
            }
        }
    }
}

void interpolate(std::span<const Stencil> stencils, const double* in, std::size_t cols, double* out) {
    const Index fine = static_cast<Index>(stencils.size());
#pragma omp parallel for schedule(static)
    for (Index k = 0; k < fine; ++k) {
        const Stencil& s = stencils[k];
        double* o = out + k * cols;
        const double* a = in + s.src[0] * cols;
        const double* b = in + s.src[1] * cols;
        const double* c = in + s.src[2] * cols;
        for (std::size_t f = 0; f < cols; ++f) o[f] = s.weight[0] * a[f] + s.weight[1] * b[f] + s.weight[2] * c[f];
    }
}

void interpolate_adjoint(std::span<const Stencil> stencils, const ScatterPlan& plan, const double* dout,
                         std::size_t cols, double* din) {
    const Index targets = static_cast<Index>(plan.targets());
#pragma omp parallel for schedule(dynamic, 16)
    for (Index c = 0; c < targets; ++c) {
        double* d = din + c * cols;
        for (std::uint32_t p = plan.offsets[c]; p < plan.offsets[c + 1]; ++p) {
            const std::uint32_t r = plan.rows[p];
            const double w = stencils[r / 3].weight[r % 3];
            const double* g = dout + static_cast<std::size_t>(r / 3) * cols;
            for (std::size_t f = 0; f < cols; ++f) d[f] += w * g[f];
        }
    }
}

void gather_add(const double* table, std::size_t cols, std::span<const std::uint32_t> index, double* out) {
    const Index rows = static_cast<Index>(index.size());
#pragma omp parallel for schedule(static)
    for (Index r = 0; r < rows; ++r) {
        const double* src = table + static_cast<std::size_t>(index[r]) * cols;
        double* o = out + r * cols;
        for (std::size_t f = 0; f < cols; ++f) o[f] += src[f];
    }
}

void scatter_add(const double* src, std::size_t cols, std::span<const std::uint32_t> index, const ScatterPlan& plan,
                 double* table) {
    (void)index;
    const Index targets = static_cast<Index>(plan.targets());
#pragma omp parallel for schedule(dynamic, 16)
    for (Index t = 0; t < targets; ++t) {
        double* d = table + t * cols;
        for (std::uint32_t p = plan.offsets[t]; p < plan.offsets[t + 1]; ++p) {
            const double* s = src + static_cast<std::size_t>(plan.rows[p]) * cols;
            for (std::size_t f = 0; f < cols; ++f) d[f] += s[f];
        }
    }
}

}  // namespace remus::kernels::omp
