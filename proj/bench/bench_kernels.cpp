// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference kernels against their OpenMP counterparts on a
// synthetic 20k-node graph. Run with REMUS_THREADS to pin the worker count.

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "remus/data.hpp"
#include "remus/geometry.hpp"
#include "remus/kernels.hpp"
#include "remus/operators.hpp"

namespace {

using namespace remus;

constexpr std::size_t kKappa = 5;
constexpr std::size_t kCols = 128;

struct Fixture {
    NodeSet nodes;
    EdgeSet edges;
    PinvTable pinv;
    std::vector<double> node_rows;  // n x 2*kCols
    std::vector<double> edge_rows;  // |E| x kCols
    std::vector<std::uint32_t> gather;
    kernels::ScatterPlan plan;

    explicit Fixture(std::size_t n) {
        nodes = generate_synthetic(7, n, 2, "rotating-rigid").nodes;
        edges = build_knn_edges(nodes, kKappa);
        pinv = pinv_blocks(edges);
        std::mt19937_64 rng(1);
        std::normal_distribution<double> g;
        node_rows.resize(n * 2 * kCols);
        edge_rows.resize(edges.size() * kCols);
        for (double& v : node_rows) v = g(rng);
        for (double& v : edge_rows) v = g(rng);
        // Angle-style gather: every edge referenced kappa times.
        for (std::size_t e = 0; e < edges.size(); ++e) {
            for (std::size_t m = 0; m < kKappa; ++m) gather.push_back(static_cast<std::uint32_t>(edges.edges[e].src * kKappa + m));
        }
        plan = kernels::ScatterPlan::build(gather, edges.size());
    }
};

Fixture& fixture() {
    static Fixture f(20000);
    return f;
}

template <bool Parallel>
void BM_Knn(benchmark::State& state) {
    Fixture& f = fixture();
    std::vector<NodeId> out(f.nodes.size() * kKappa);
    for (auto _ : state) {
        if constexpr (Parallel) kernels::omp::knn_sources(f.nodes.coords, kKappa, out);
        else kernels::serial::knn_sources(f.nodes.coords, kKappa, out);
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_ApplyPinv(benchmark::State& state) {
    Fixture& f = fixture();
    std::vector<double> out(f.nodes.size() * 2 * kCols);
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::omp::apply_pinv(f.pinv.data, kKappa, f.nodes.size(), f.edge_rows.data(), kCols, out.data());
        } else {
            kernels::serial::apply_pinv(f.pinv.data, kKappa, f.nodes.size(), f.edge_rows.data(), kCols, out.data());
        }
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_ProjectRows(benchmark::State& state) {
    Fixture& f = fixture();
    std::vector<double> out(f.edges.size() * kCols);
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::omp::project_rows(f.edges.unit, kKappa, f.node_rows.data(), kCols, out.data());
        } else {
            kernels::serial::project_rows(f.edges.unit, kKappa, f.node_rows.data(), kCols, out.data());
        }
        benchmark::DoNotOptimize(out.data());
    }
}

template <bool Parallel>
void BM_ScatterAdd(benchmark::State& state) {
    Fixture& f = fixture();
    std::vector<double> src(f.gather.size() * kCols, 1.0);
    std::vector<double> table(f.edges.size() * kCols);
    for (auto _ : state) {
        if constexpr (Parallel) {
            kernels::omp::scatter_add(src.data(), kCols, f.gather, f.plan, table.data());
        } else {
            kernels::serial::scatter_add(src.data(), kCols, f.gather, f.plan, table.data());
        }
        benchmark::DoNotOptimize(table.data());
    }
}

}  // namespace

BENCHMARK(BM_Knn<false>)->Name("knn/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Knn<true>)->Name("knn/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyPinv<false>)->Name("apply_pinv/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ApplyPinv<true>)->Name("apply_pinv/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProjectRows<false>)->Name("project_rows/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProjectRows<true>)->Name("project_rows/omp")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScatterAdd<false>)->Name("scatter_add/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScatterAdd<true>)->Name("scatter_add/omp")->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    remus::kernels::configure_threads();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
