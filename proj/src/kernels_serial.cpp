// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <utility>

#include "remus/kernels.hpp"

#if defined(REMUS_WITH_OPENMP)
#include <omp.h>
#endif

namespace remus::kernels {

ScatterPlan ScatterPlan::build(std::span<const std::uint32_t> index, std::size_t targets) {
    ScatterPlan plan;
    plan.offsets.assign(targets + 1, 0);
    for (std::uint32_t t : index) ++plan.offsets[t + 1];
    for (std::size_t t = 0; t < targets; ++t) plan.offsets[t + 1] += plan.offsets[t];
    plan.rows.resize(index.size());
    std::vector<std::uint32_t> cursor(plan.offsets.begin(), plan.offsets.end() - 1);
    for (std::size_t r = 0; r < index.size(); ++r) plan.rows[cursor[index[r]]++] = static_cast<std::uint32_t>(r);
    return plan;
}

void set_threads(int threads) {
#if defined(REMUS_WITH_OPENMP)
    if (threads > 0) {
        omp_set_num_threads(threads);
    } else {
        omp_set_num_threads(omp_get_num_procs());
    }
#else
    (void)threads;
#endif
}

void configure_threads() {
    if (const char* env = std::getenv("REMUS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) set_threads(n);
    }
}

namespace serial {

void knn_sources(std::span<const Vec2> coords, std::size_t kappa, std::span<NodeId> out) {
    const std::size_t n = coords.size();
    std::vector<std::pair<double, NodeId>> cand(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const double dx = coords[i].x - coords[j].x;
            const double dy = coords[i].y - coords[j].y;
            cand[c++] = {dx * dx + dy * dy, static_cast<NodeId>(i)};
        }
        std::partial_sort(cand.begin(), cand.begin() + kappa, cand.end());
        for (std::size_t m = 0; m < kappa; ++m) out[j * kappa + m] = cand[m].second;
    }
}

void project_vectors(std::span<const Vec2> unit, std::size_t kappa, const double* field, double* out) {
    for (std::size_t e = 0; e < unit.size(); ++e) {
        const double* u = field + 2 * (e / kappa);
        out[e] = unit[e].x * u[0] + unit[e].y * u[1];
    }
}

void apply_pinv(std::span<const double> pinv, std::size_t kappa, std::size_t nodes, const double* x,
                std::size_t cols, double* out) {
    for (std::size_t j = 0; j < nodes; ++j) {
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
    for (std::size_t j = 0; j < nodes; ++j) {
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
    for (std::size_t e = 0; e < unit.size(); ++e) {
        const double* wk = w + (e / kappa) * 2 * cols;
        double* o = out + e * cols;
        const double ux = unit[e].x;
        const double uy = unit[e].y;
        for (std::size_t f = 0; f < cols; ++f) o[f] = ux * wk[f] + uy * wk[cols + f];
    }
}

void project_rows_adjoint(std::span<const Vec2> unit, std::size_t kappa, const double* dout, std::size_t cols,
                          double* dw) {
    for (std::size_t e = 0; e < unit.size(); ++e) {
        double* g = dw + (e / kappa) * 2 * cols;
        const double* d = dout + e * cols;
        const double ux = unit[e].x;
        const double uy = unit[e].y;
        for (std::size_t f = 0; f < cols; ++f) {
            g[f] += ux * d[f];
            g[cols + f] += uy * d[f];
        }
    }
}

void interpolate(std::span<const Stencil> stencils, const double* in, std::size_t cols, double* out) {
    for (std::size_t k = 0; k < stencils.size(); ++k) {
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
    (void)plan;
    for (std::size_t k = 0; k < stencils.size(); ++k) {
        const double* g = dout + k * cols;
        for (std::size_t t = 0; t < 3; ++t) {
            double* d = din + stencils[k].src[t] * cols;
            const double w = stencils[k].weight[t];
            for (std::size_t f = 0; f < cols; ++f) d[f] += w * g[f];
        }
    }
}

void gather_add(const double* table, std::size_t cols, std::span<const std::uint32_t> index, double* out) {
    for (std::size_t r = 0; r < index.size(); ++r) {
        const double* src = table + static_cast<std::size_t>(index[r]) * cols;
        double* o = out + r * cols;
        for (std::size_t f = 0; f < cols; ++f) o[f] += src[f];
    }
}

void scatter_add(const double* src, std::size_t cols, std::span<const std::uint32_t> index, const ScatterPlan& plan,
                 double* table) {
    (void)plan;
    for (std::size_t r = 0; r < index.size(); ++r) {
        double* t = table + static_cast<std::size_t>(index[r]) * cols;
        const double* s = src + r * cols;
        for (std::size_t f = 0; f < cols; ++f) t[f] += s[f];
    }
}

}  // namespace serial
}  // namespace remus::kernels
