// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// Sample directory layout:
//   meta.json   {"version":1,"family","param","dt","T","N","seed","t0","frame_angle"}
//   nodes.csv   header "x,y,omega", one node per row
//   fields.bin  "RMSF1" then T*N*2 little-endian float64, time-major,
//               node-minor, x before y
//
// A dataset is a directory holding manifest.json and one subdirectory per sample.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "remus/geometry.hpp"
#include "remus/matrix.hpp"

namespace remus {

inline constexpr int kSampleVersion = 1;

struct FieldSeries {
    double dt = 0.1;
    std::size_t steps = 0;  // T
    std::size_t nodes = 0;  // N
    std::vector<double> values;  // T * N * 2

    /// Field at time index t as an N x 2 matrix.
    Matrix frame(std::size_t t) const;
    void set_frame(std::size_t t, const Matrix& field);
    /// Throws InvalidArgument on a size mismatch, T < 2 or a non-finite value.
    void validate() const;
};

struct Sample {
    std::string family;
    double param = 0.0;
    std::uint64_t seed = 0;
    double t0 = 0.0;
    double frame_angle = 0.0;
    NodeSet nodes;
    FieldSeries fields;
};

enum class Family { AdvectedVortex, RotatingRigid, TaylorGreen };

/// Throws BadFamily for unknown names.
Family parse_family(std::string_view name);
std::string_view family_name(Family family);

struct SyntheticOptions {
    double dt = 0.1;
    double t0 = 0.0;
    /// Rotates the whole sample (nodes and field) about the domain center.
    double frame_angle = 0.0;
    /// Family parameter; drawn from the seed when NaN.
    double param = std::numeric_limits<double>::quiet_NaN();
};

/// Domain: the rectangle [-2,2] x [-1.5,1.5] minus a disc of radius 0.4 at
/// the origin. The outer ring nodes carry the Dirichlet flag.
inline constexpr double kDomainHalfWidth = 2.0;
inline constexpr double kDomainHalfHeight = 1.5;
inline constexpr double kHoleRadius = 0.4;

/// Closed-form velocity of `family` at point x (unrotated frame) and time t.
Vec2 analytic_velocity(Family family, double param, Vec2 x, double t);
/// Same in a frame rotated by `frame_angle`: R u(R^T x, t).
Vec2 analytic_velocity(Family family, double param, Vec2 x, double t, double frame_angle);

/// Throws BadFamily, TooFewNodes (n_nodes < 4) or InvalidArgument (steps < 2).
Sample generate_synthetic(std::uint64_t seed, std::size_t n_nodes, std::size_t steps, std::string_view family,
                          const SyntheticOptions& options = {});

void save_sample(const std::filesystem::path& dir, const Sample& sample);
/// Throws ParseError (with a byte offset where one applies), VersionMismatch, IoError.
Sample load_sample(const std::filesystem::path& dir);

/// Adds i.i.d. uniform(-0.01, 0.01) noise, deterministic per seed.
Matrix add_noise(const Matrix& field, std::uint64_t seed);
inline constexpr double kNoiseAmplitude = 0.01;

struct DatasetEntry {
    std::string path;  // relative to the dataset directory
    std::string split;  // train | val | test
};

struct DatasetManifest {
    std::filesystem::path root;
    std::vector<DatasetEntry> samples;
    nlohmann::json generator;
    std::uint64_t seed = 0;

    std::vector<std::filesystem::path> paths(std::string_view split) const;
};

void save_manifest(const DatasetManifest& manifest);
/// Reads `<dir>/manifest.json`; throws ParseError for a malformed manifest
/// and IoError when a referenced sample directory is missing.
DatasetManifest load_manifest(const std::filesystem::path& dir);

}  // namespace remus
