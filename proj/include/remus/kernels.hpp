// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops of the graph operators. Every kernel exists as a
// serial reference (kernels::serial) and an OpenMP version (kernels::omp).
// Both produce bit-identical results: parallel loops never share an output
// row, and scatters run through a ScatterPlan that replays the serial
// accumulation order per target row.
//
// Dense blocks are row-major; `cols` is the row stride.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "remus/geometry.hpp"

namespace remus::kernels {

/// Reverse index of a gather: for every target row the source rows that
/// reference it, in ascending order.
struct ScatterPlan {
    std::vector<std::uint32_t> offsets;  // size targets + 1
    std::vector<std::uint32_t> rows;

    static ScatterPlan build(std::span<const std::uint32_t> index, std::size_t targets);
    std::size_t targets() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

/// Three-point inverse-square-distance interpolation stencil of a fine node.
struct Stencil {
    std::array<NodeId, 3> src{};
    std::array<double, 3> weight{};
};

/// Caps the OpenMP worker count; 0 restores the runtime default. Reads
/// REMUS_THREADS when called with no argument.
void configure_threads();
void set_threads(int threads);

namespace serial {
/// out[j*kappa + m] = the kappa nearest sources of node j.
void knn_sources(std::span<const Vec2> coords, std::size_t kappa, std::span<NodeId> out);
/// out[e] = unit[e] . field[dst(e)], field is n x 2.
void project_vectors(std::span<const Vec2> unit, std::size_t kappa, const double* field, double* out);
/// out_j = pinv_j (2 x kappa) * x_j (kappa x cols); out_j is one row of 2*cols.
void apply_pinv(std::span<const double> pinv, std::size_t kappa, std::size_t nodes, const double* x,
                std::size_t cols, double* out);
/// dx_j += pinv_j^T dout_j
void apply_pinv_adjoint(std::span<const double> pinv, std::size_t kappa, std::size_t nodes,
                        const double* dout, std::size_t cols, double* dx);
/// out[e] = unit[e] . W_dst(e), with W_k stored as one row of 2*cols.
void project_rows(std::span<const Vec2> unit, std::size_t kappa, const double* w, std::size_t cols,
                  double* out);
/// dW_k += sum over incoming e of unit[e] (outer) dout[e]
void project_rows_adjoint(std::span<const Vec2> unit, std::size_t kappa, const double* dout,
                          std::size_t cols, double* dw);
/// out[k] = sum_t weight[k][t] * in[src[k][t]]
void interpolate(std::span<const Stencil> stencils, const double* in, std::size_t cols, double* out);
/// din[src[k][t]] += weight[k][t] * dout[k]; `plan` is built over the flattened src ids.
void interpolate_adjoint(std::span<const Stencil> stencils, const ScatterPlan& plan, const double* dout,
                         std::size_t cols, double* din);
/// out[r] += table[index[r]]
void gather_add(const double* table, std::size_t cols, std::span<const std::uint32_t> index, double* out);
/// table[index[r]] += src[r]
void scatter_add(const double* src, std::size_t cols, std::span<const std::uint32_t> index,
                 const ScatterPlan& plan, double* table);
}  // namespace serial

// Same contracts as serial; bit-identical output.
namespace omp {
void knn_sources(std::span<const Vec2> coords, std::size_t kappa, std::span<NodeId> out);
void project_vectors(std::span<const Vec2> unit, std::size_t kappa, const double* field, double* out);
void apply_pinv(std::span<const double> pinv, std::size_t kappa, std::size_t nodes, const double* x,
                std::size_t cols, double* out);
void apply_pinv_adjoint(std::span<const double> pinv, std::size_t kappa, std::size_t nodes,
                        const double* dout, std::size_t cols, double* dx);
void project_rows(std::span<const Vec2> unit, std::size_t kappa, const double* w, std::size_t cols,
                  double* out);
void project_rows_adjoint(std::span<const Vec2> unit, std::size_t kappa, const double* dout,
                          std::size_t cols, double* dw);
void interpolate(std::span<const Stencil> stencils, const double* in, std::size_t cols, double* out);
void interpolate_adjoint(std::span<const Stencil> stencils, const ScatterPlan& plan, const double* dout,
                         std::size_t cols, double* din);
void gather_add(const double* table, std::size_t cols, std::span<const std::uint32_t> index, double* out);
void scatter_add(const double* src, std::size_t cols, std::span<const std::uint32_t> index,
                 const ScatterPlan& plan, double* table);
}  // namespace omp

#if defined(REMUS_WITH_OPENMP)
namespace active = omp;
#else
namespace active = serial;
#endif

}  // namespace remus::kernels
