// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Generators and fixtures shared by the test binaries.

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "remus/geometry.hpp"
#include "remus/matrix.hpp"

namespace remus::test {

/// n uniform points in [0, scale)^2 with random Dirichlet flags and params.
inline NodeSet random_nodes(std::uint64_t seed, std::size_t n, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, scale);
    std::bernoulli_distribution flag(0.2);
    NodeSet nodes;
    for (std::size_t i = 0; i < n; ++i) {
        nodes.coords.push_back({u(rng), u(rng)});
        nodes.dirichlet.push_back(flag(rng) ? 1 : 0);
        nodes.param.push_back(u(rng));
    }
    return nodes;
}

inline Matrix random_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, scale);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
    return m;
}

inline std::vector<Vec2> random_vectors(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<Vec2> out(n);
    for (Vec2& v : out) v = {g(rng), g(rng)};
    return out;
}

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("remus_test_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace remus::test
