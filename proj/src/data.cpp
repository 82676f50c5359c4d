// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>

#include "remus/error.hpp"
#include "remus/nn/checkpoint.hpp"

namespace remus {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kFieldMagic = "RMSF1";
constexpr double kTaylorGreenWave = std::numbers::pi / 2.0;
constexpr double kVortexCore = 0.3;
constexpr double kVortexDrift = 0.2;
constexpr Vec2 kVortexStart{-1.0, 0.5};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& path, std::string_view bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write to " + path.string());
}

nlohmann::json parse_json(const fs::path& path) {
    const std::string text = read_file(path);
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError,
                    path.filename().string() + ": bad JSON at byte offset " + std::to_string(e.byte) + ": " + e.what());
    }
}

template <typename T>
T required(const nlohmann::json& j, const char* key, const fs::path& path) {
    if (!j.contains(key)) throw Error(ErrorCode::ParseError, path.filename().string() + ": missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, path.filename().string() + ": bad value for '" + key + "': " + e.what());
    }
}

void check_version(const nlohmann::json& j, const fs::path& path) {
    const int version = required<int>(j, "version", path);
    if (version != kSampleVersion) {
        throw Error(ErrorCode::VersionMismatch, path.filename().string() + ": version " + std::to_string(version) +
                                                    ", expected " + std::to_string(kSampleVersion));
    }
}

// Uniform point on the boundary of the outer rectangle, by arc length.
Vec2 perimeter_point(double s) {
    const double w = 2.0 * kDomainHalfWidth;
    const double h = 2.0 * kDomainHalfHeight;
    if (s < w) return {-kDomainHalfWidth + s, -kDomainHalfHeight};
    s -= w;
    if (s < h) return {kDomainHalfWidth, -kDomainHalfHeight + s};
    s -= h;
    if (s < w) return {kDomainHalfWidth - s, kDomainHalfHeight};
    s -= w;
    return {-kDomainHalfWidth, kDomainHalfHeight - s};
}

double default_param(Family family, std::mt19937_64& rng) {
    switch (family) {
        case Family::RotatingRigid: return std::uniform_real_distribution<double>(0.5, 1.5)(rng);
        case Family::TaylorGreen: return std::uniform_real_distribution<double>(0.02, 0.1)(rng);
        case Family::AdvectedVortex: return std::uniform_real_distribution<double>(0.5, 2.0)(rng);
    }
    return 0.0;
}

}  // namespace

Matrix FieldSeries::frame(std::size_t t) const {
    if (t >= steps) throw Error(ErrorCode::InvalidArgument, "time index " + std::to_string(t) + " out of range");
    return Eigen::Map<const Matrix>(values.data() + t * nodes * 2, static_cast<Eigen::Index>(nodes), 2);
}

void FieldSeries::set_frame(std::size_t t, const Matrix& field) {
    if (t >= steps || field.rows() != static_cast<Eigen::Index>(nodes) || field.cols() != 2) {
        throw Error(ErrorCode::InvalidArgument, "frame shape or index mismatch");
    }
    Eigen::Map<Matrix>(values.data() + t * nodes * 2, static_cast<Eigen::Index>(nodes), 2) = field;
}

void FieldSeries::validate() const {
    if (steps < 2) throw Error(ErrorCode::InvalidArgument, "a field series needs at least 2 time steps");
    if (values.size() != steps * nodes * 2) throw Error(ErrorCode::InvalidArgument, "field series size mismatch");
    if (!std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorCode::InvalidArgument, "field series has non-finite values");
    }
}

Family parse_family(std::string_view name) {
    if (name == "advected-vortex") return Family::AdvectedVortex;
    if (name == "rotating-rigid") return Family::RotatingRigid;
    if (name == "taylor-green") return Family::TaylorGreen;
    throw Error(ErrorCode::BadFamily,
                "unknown family '" + std::string(name) + "' (advected-vortex, rotating-rigid, taylor-green)");
}

std::string_view family_name(Family family) {
    switch (family) {
        case Family::AdvectedVortex: return "advected-vortex";
        case Family::RotatingRigid: return "rotating-rigid";
        case Family::TaylorGreen: return "taylor-green";
    }
    return "";
}

Vec2 analytic_velocity(Family family, double param, Vec2 x, double t) {
    switch (family) {
        case Family::RotatingRigid: return {-param * x.y, param * x.x};
        case Family::TaylorGreen: {
            const double k = kTaylorGreenWave;
            const double decay = std::exp(-2.0 * param * k * k * t);
            return {std::sin(k * x.x) * std::cos(k * x.y) * decay, -std::cos(k * x.x) * std::sin(k * x.y) * decay};
        }
        case Family::AdvectedVortex: {
            const Vec2 center{kVortexStart.x + kVortexDrift * t, kVortexStart.y};
            const Vec2 d = x - center;
            const double r2 = dot(d, d);
            const double c2 = kVortexCore * kVortexCore;
            // Lamb-Oseen swirl; finite limit Gamma / (2 pi c^2) at the core.
            const double swirl = r2 < 1e-12 ? param / (2.0 * std::numbers::pi * c2)
                                            : param / (2.0 * std::numbers::pi) * -std::expm1(-r2 / c2) / r2;
            return {kVortexDrift - swirl * d.y, swirl * d.x};
        }
    }
    return {};
}

Vec2 analytic_velocity(Family family, double param, Vec2 x, double t, double frame_angle) {
    if (frame_angle == 0.0) return analytic_velocity(family, param, x, t);
    const Rotation r = Rotation::from_angle(frame_angle);
    return r.rotate(analytic_velocity(family, param, r.inverse().rotate(x), t));
}

Sample generate_synthetic(std::uint64_t seed, std::size_t n_nodes, std::size_t steps, std::string_view family_str,
                          const SyntheticOptions& options) {
    const Family family = parse_family(family_str);
    if (n_nodes < 4) throw Error(ErrorCode::TooFewNodes, "need at least 4 nodes, got " + std::to_string(n_nodes));
    if (steps < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 time steps");
    if (!(options.dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");

    std::mt19937_64 rng(seed);
    Sample s;
    s.family = std::string(family_name(family));
    s.param = std::isnan(options.param) ? default_param(family, rng) : options.param;
    s.seed = seed;
    s.t0 = options.t0;
    s.frame_angle = options.frame_angle;

    const double width = 2.0 * kDomainHalfWidth;
    const double height = 2.0 * kDomainHalfHeight;
    const double area = width * height - std::numbers::pi * kHoleRadius * kHoleRadius;
    const double perimeter = 2.0 * (width + height);
    const double spacing = std::sqrt(area / static_cast<double>(n_nodes));
    // One jittered ring node per perimeter segment of about three interior
    // spacings, so no boundary node sees only collinear neighbors.
    const std::size_t ring =
        std::min(n_nodes / 4, static_cast<std::size_t>(std::lround(perimeter / (3.0 * spacing))));

    std::vector<Vec2> coords;
    coords.reserve(n_nodes);
    if (ring > 0) {
        const double segment = perimeter / static_cast<double>(ring);
        const double offset = std::uniform_real_distribution<double>(0.0, segment)(rng);
        std::uniform_real_distribution<double> jitter(-0.35, 0.35);
        for (std::size_t i = 0; i < ring; ++i) {
            const double s_along = offset + (static_cast<double>(i) + jitter(rng)) * segment;
            coords.push_back(perimeter_point(std::fmod(s_along + perimeter, perimeter)));
        }
    }
    std::uniform_real_distribution<double> ux(-kDomainHalfWidth, kDomainHalfWidth);
    std::uniform_real_distribution<double> uy(-kDomainHalfHeight, kDomainHalfHeight);
    while (coords.size() < n_nodes) {
        const Vec2 p{ux(rng), uy(rng)};
        if (dot(p, p) > kHoleRadius * kHoleRadius) coords.push_back(p);
    }

    const Rotation frame = Rotation::from_angle(options.frame_angle);
    s.nodes.coords.resize(n_nodes);
    s.nodes.dirichlet.assign(n_nodes, 0);
    s.nodes.param.assign(n_nodes, s.param);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        s.nodes.coords[i] = options.frame_angle == 0.0 ? coords[i] : frame.rotate(coords[i]);
        s.nodes.dirichlet[i] = i < ring ? 1 : 0;
    }

    s.fields.dt = options.dt;
    s.fields.steps = steps;
    s.fields.nodes = n_nodes;
    s.fields.values.resize(steps * n_nodes * 2);
    for (std::size_t t = 0; t < steps; ++t) {
        const double time = options.t0 + static_cast<double>(t) * options.dt;
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const Vec2 u = analytic_velocity(family, s.param, s.nodes.coords[i], time, options.frame_angle);
            s.fields.values[(t * n_nodes + i) * 2] = u.x;
            s.fields.values[(t * n_nodes + i) * 2 + 1] = u.y;
        }
    }
    return s;
}

void save_sample(const fs::path& dir, const Sample& sample) {
    sample.fields.validate();
    if (sample.nodes.size() != sample.fields.nodes) {
        throw Error(ErrorCode::InvalidArgument, "sample has " + std::to_string(sample.nodes.size()) +
                                                    " nodes but fields for " + std::to_string(sample.fields.nodes));
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

    const nlohmann::json meta = {{"version", kSampleVersion}, {"family", sample.family},
                                 {"param", sample.param},     {"dt", sample.fields.dt},
                                 {"T", sample.fields.steps},  {"N", sample.fields.nodes},
                                 {"seed", sample.seed},       {"t0", sample.t0},
                                 {"frame_angle", sample.frame_angle}};
    write_file(dir / "meta.json", meta.dump(2) + "\n");
    save_nodes_csv(dir / "nodes.csv", sample.nodes);

    std::vector<char> bytes(kFieldMagic.begin(), kFieldMagic.end());
    bytes.reserve(kFieldMagic.size() + sample.fields.values.size() * 8);
    for (double v : sample.fields.values) nn::write_f64_le(bytes, v);
    write_file(dir / "fields.bin", std::string_view(bytes.data(), bytes.size()));
}

Sample load_sample(const fs::path& dir) {
    const fs::path meta_path = dir / "meta.json";
    const nlohmann::json meta = parse_json(meta_path);
    check_version(meta, meta_path);

    Sample s;
    s.family = required<std::string>(meta, "family", meta_path);
    s.param = required<double>(meta, "param", meta_path);
    s.seed = required<std::uint64_t>(meta, "seed", meta_path);
    s.t0 = required<double>(meta, "t0", meta_path);
    s.frame_angle = required<double>(meta, "frame_angle", meta_path);
    s.fields.dt = required<double>(meta, "dt", meta_path);
    s.fields.steps = required<std::size_t>(meta, "T", meta_path);
    s.fields.nodes = required<std::size_t>(meta, "N", meta_path);

    s.nodes = load_nodes_csv(dir / "nodes.csv");
    s.nodes.param.assign(s.nodes.size(), s.param);
    if (s.nodes.size() != s.fields.nodes) {
        throw Error(ErrorCode::ParseError, "node count mismatch: nodes.csv has " + std::to_string(s.nodes.size()) +
                                               " nodes, meta.json declares " + std::to_string(s.fields.nodes));
    }

    const std::string bytes = read_file(dir / "fields.bin");
    if (bytes.size() < kFieldMagic.size() || bytes.compare(0, 4, kFieldMagic.substr(0, 4)) != 0) {
        throw Error(ErrorCode::ParseError, "fields.bin: missing RMSF magic at byte offset 0");
    }
    if (bytes[4] != kFieldMagic[4]) {
        throw Error(ErrorCode::VersionMismatch,
                    std::string("fields.bin: format version '") + bytes[4] + "', expected '1'");
    }
    const std::size_t payload = bytes.size() - kFieldMagic.size();
    const std::size_t frame_bytes = s.fields.steps * 2 * 8;
    const std::size_t expected = frame_bytes * s.fields.nodes;
    if (payload != expected) {
        if (frame_bytes > 0 && payload % frame_bytes == 0) {
            throw Error(ErrorCode::ParseError, "node count mismatch: nodes.csv has " + std::to_string(s.nodes.size()) +
                                                   " nodes, fields.bin holds " +
                                                   std::to_string(payload / frame_bytes));
        }
        throw Error(ErrorCode::ParseError, "fields.bin: truncated at byte offset " + std::to_string(bytes.size()) +
                                               ", expected " + std::to_string(expected + kFieldMagic.size()) +
                                               " bytes");
    }
    s.fields.values.resize(s.fields.steps * s.fields.nodes * 2);
    for (std::size_t i = 0; i < s.fields.values.size(); ++i) {
        const std::size_t offset = kFieldMagic.size() + i * 8;
        const double v = nn::read_f64_le(bytes.data() + offset);
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::ParseError, "fields.bin: non-finite value at byte offset " + std::to_string(offset));
        }
        s.fields.values[i] = v;
    }
    if (s.fields.steps < 2) throw Error(ErrorCode::ParseError, "meta.json: T must be at least 2");
    return s;
}

Matrix add_noise(const Matrix& field, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> noise(-kNoiseAmplitude, kNoiseAmplitude);
    Matrix out = field;
    for (Eigen::Index i = 0; i < out.size(); ++i) out.data()[i] += noise(rng);
    return out;
}

std::vector<fs::path> DatasetManifest::paths(std::string_view split) const {
    std::vector<fs::path> out;
    for (const DatasetEntry& e : samples) {
        if (e.split == split) out.push_back(root / e.path);
    }
    return out;
}

void save_manifest(const DatasetManifest& manifest) {
    nlohmann::json samples = nlohmann::json::array();
    for (const DatasetEntry& e : manifest.samples) samples.push_back({{"path", e.path}, {"split", e.split}});
    const nlohmann::json j = {{"version", kSampleVersion},
                              {"seed", manifest.seed},
                              {"generator", manifest.generator},
                              {"samples", samples}};
    std::error_code ec;
    fs::create_directories(manifest.root, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + manifest.root.string() + ": " + ec.message());
    write_file(manifest.root / "manifest.json", j.dump(2) + "\n");
}

DatasetManifest load_manifest(const fs::path& dir) {
    const fs::path path = dir / "manifest.json";
    const nlohmann::json j = parse_json(path);
    check_version(j, path);
    DatasetManifest m;
    m.root = dir;
    m.seed = j.value("seed", std::uint64_t{0});
    m.generator = j.value("generator", nlohmann::json::object());
    const auto entries = required<nlohmann::json>(j, "samples", path);
    if (!entries.is_array()) throw Error(ErrorCode::ParseError, "manifest.json: 'samples' must be an array");
    for (const auto& e : entries) {
        DatasetEntry entry{required<std::string>(e, "path", path), required<std::string>(e, "split", path)};
        if (entry.split != "train" && entry.split != "val" && entry.split != "test") {
            throw Error(ErrorCode::ParseError, "manifest.json: unknown split '" + entry.split + "'");
        }
        if (!fs::exists(dir / entry.path / "meta.json")) {
            throw Error(ErrorCode::IoError, "manifest.json: sample " + entry.path + " not found under " + dir.string());
        }
        m.samples.push_back(std::move(entry));
    }
    return m;
}

}  // namespace remus
