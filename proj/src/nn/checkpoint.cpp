// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "remus/error.hpp"

namespace remus::nn {

namespace {

constexpr char kMagic[] = "REMUS1";
constexpr std::size_t kMagicLen = 6;

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        std::uint64_t r = 0;
        for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return r;
    }
}

void write_u64_le(std::vector<char>& out, std::uint64_t v) {
    v = to_le(v);
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.insert(out.end(), buf, buf + 8);
}

std::uint64_t read_u64_le(const char* bytes) {
    std::uint64_t v = 0;
    std::memcpy(&v, bytes, 8);
    return to_le(v);
}

}  // namespace

void write_f64_le(std::vector<char>& out, double v) { write_u64_le(out, std::bit_cast<std::uint64_t>(v)); }

double read_f64_le(const char* bytes) { return std::bit_cast<double>(read_u64_le(bytes)); }

void save_checkpoint(const std::filesystem::path& path, const ParamStore& params, nlohmann::json metadata) {
    nlohmann::json manifest = nlohmann::json::array();
    for (const ParamInfo& p : params.manifest()) {
        manifest.push_back({{"name", p.name}, {"rows", p.rows}, {"cols", p.cols}});
    }
    metadata["manifest"] = std::move(manifest);
    const std::string header = metadata.dump();

    std::vector<char> bytes(kMagic, kMagic + kMagicLen);
    write_u64_le(bytes, header.size());
    bytes.insert(bytes.end(), header.begin(), header.end());
    bytes.reserve(bytes.size() + 8 * params.size());
    for (double v : params.values()) write_f64_le(bytes, v);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    const std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (bytes.size() < kMagicLen || std::memcmp(bytes.data(), kMagic, 5) != 0) {
        throw Error(ErrorCode::ParseError, "missing REMUS magic at byte offset 0");
    }
    if (bytes[5] != kMagic[5]) {
        throw Error(ErrorCode::VersionMismatch, std::string("checkpoint version '") + bytes[5] + "', expected '1'");
    }
    if (bytes.size() < kMagicLen + 8) throw Error(ErrorCode::ParseError, "truncated header length at byte offset 6");
    const std::uint64_t header_len = read_u64_le(bytes.data() + kMagicLen);
    const std::size_t body = kMagicLen + 8;
    if (header_len > bytes.size() - body) {
        throw Error(ErrorCode::ParseError, "truncated JSON header at byte offset " + std::to_string(body));
    }

    Checkpoint ck;
    try {
        ck.header = nlohmann::json::parse(bytes.begin() + static_cast<std::ptrdiff_t>(body),
                                          bytes.begin() + static_cast<std::ptrdiff_t>(body + header_len));
        std::size_t offset = 0;
        for (const auto& entry : ck.header.at("manifest")) {
            ParamInfo p{entry.at("name").get<std::string>(), offset, entry.at("rows").get<std::size_t>(),
                        entry.at("cols").get<std::size_t>()};
            offset += p.size();
            ck.manifest.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, "bad JSON header at byte offset " + std::to_string(body) + ": " + e.what());
    }
    const std::size_t count = ck.manifest.empty() ? 0 : ck.manifest.back().offset + ck.manifest.back().size();
    const std::size_t data = body + header_len;
    if (bytes.size() - data != 8 * count) {
        throw Error(ErrorCode::ParseError, "expected " + std::to_string(count) + " parameters (" +
                                               std::to_string(8 * count) + " bytes) at byte offset " +
                                               std::to_string(data) + ", found " + std::to_string(bytes.size() - data) +
                                               " bytes");
    }
    ck.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) ck.values[i] = read_f64_le(bytes.data() + data + 8 * i);
    return ck;
}

void restore(ParamStore& params, const Checkpoint& ck) {
    const auto& m = params.manifest();
    bool same = m.size() == ck.manifest.size();
    for (std::size_t i = 0; same && i < m.size(); ++i) {
        same = m[i].name == ck.manifest[i].name && m[i].rows == ck.manifest[i].rows && m[i].cols == ck.manifest[i].cols;
    }
    if (!same) throw Error(ErrorCode::InvalidArgument, "checkpoint manifest does not match the model");
    std::copy(ck.values.begin(), ck.values.end(), params.values().begin());
}

}  // namespace remus::nn
