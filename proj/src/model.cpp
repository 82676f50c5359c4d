// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/model.hpp"

#include <cmath>
#include <string>

#include "remus/error.hpp"

namespace remus {

using nn::MlpInput;
using nn::Tape;
using nn::Var;

void ModelConfig::validate() const {
    if (levels < 1) throw Error(ErrorCode::InvalidArgument, "model needs at least one level");
    if (kappa < 2) throw Error(ErrorCode::InvalidArgument, "kappa must be at least 2");
    if (hidden == 0 || features == 0) throw Error(ErrorCode::InvalidArgument, "widths must be positive");
    if (mp_layers.size() != levels) {
        throw Error(ErrorCode::InvalidArgument, "mp_layers needs one count per level (" + std::to_string(levels) + ")");
    }
    for (std::size_t c : mp_layers) {
        if (c == 0) throw Error(ErrorCode::InvalidArgument, "message-passing counts must be positive");
    }
}

nlohmann::json ModelConfig::to_json() const {
    return {{"levels", levels}, {"kappa", kappa},         {"hidden", hidden},
            {"features", features}, {"mp_layers", mp_layers}, {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.levels = j.value("levels", c.levels);
    c.kappa = j.value("kappa", c.kappa);
    c.hidden = j.value("hidden", c.hidden);
    c.features = j.value("features", c.features);
    c.mp_layers = j.value("mp_layers", c.mp_layers);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

ModelPlan ModelPlan::build(const Hierarchy& h) {
    ModelPlan plan;
    plan.levels.resize(h.depth());
    for (std::size_t l = 0; l < h.depth(); ++l) {
        const LevelGraph& g = h.levels[l];
        ModelPlan::Level& p = plan.levels[l];
        p.angle_in = nn::GatherIndex::make(g.angles.in_edge, g.edges.size());
        p.angle_out = nn::GatherIndex::make(g.angles.out_edge, g.edges.size());
        if (l > 0) {
            p.pool_in = nn::GatherIndex::make(h.pool_angles[l].in_edge, h.levels[l - 1].edges.size());
            p.pool_out = nn::GatherIndex::make(h.pool_angles[l].out_edge, g.edges.size());
        }
        if (l + 1 < h.depth()) p.interp = graph::InterpPlan::make(h.interp[l], h.levels[l + 1].nodes.size());
    }
    return plan;
}

Matrix raw_edge_attributes(const LevelGraph& level, const Matrix& field) {
    const std::size_t n = level.nodes.size();
    Matrix local(static_cast<Eigen::Index>(n), 2);
    for (std::size_t j = 0; j < n; ++j) local.row(static_cast<Eigen::Index>(j)) = field.row(level.finest[j]);
    std::vector<double> proj(level.edges.size());
    kernels::active::project_vectors(level.edges.unit, level.edges.kappa, local.data(), proj.data());
    Matrix attrs(static_cast<Eigen::Index>(level.edges.size()), 3);
    for (std::size_t e = 0; e < level.edges.size(); ++e) {
        const NodeId j = level.edges.edges[e].dst;
        attrs(static_cast<Eigen::Index>(e), 0) = proj[e];
        attrs(static_cast<Eigen::Index>(e), 1) = level.nodes.param[j];
        attrs(static_cast<Eigen::Index>(e), 2) = static_cast<double>(level.nodes.dirichlet[j]);
    }
    return attrs;
}

Matrix raw_angle_attributes(const AngleSet& angles) {
    Matrix attrs(static_cast<Eigen::Index>(angles.size()), 4);
    for (std::size_t a = 0; a < angles.size(); ++a) {
        for (std::size_t c = 0; c < 4; ++c) attrs(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = angles.attrs[a][c];
    }
    return attrs;
}

Model::Model(ModelConfig config) : config_(std::move(config)) {
    config_.validate();
    const std::size_t L = config_.levels;
    const std::size_t H = config_.hidden;
    const std::size_t F = config_.features;
    auto level_name = [](std::size_t l) { return "l" + std::to_string(l + 1); };
    auto mp_layer = [&](const std::string& prefix) {
        return EdgeMpLayer{nn::Mlp::create(params_, prefix + ".fa", {3 * F, H, F}, true),
                           nn::Mlp::create(params_, prefix + ".fe", {2 * F, H, F}, true)};
    };

    edge_enc_.resize(L);
    angle_enc_.resize(L);
    pool_enc_.resize(L);
    down_.resize(L);
    up_.resize(L);
    pool_.resize(L);
    unpool_.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
        edge_enc_[l] = nn::Mlp::create(params_, "enc.edge." + level_name(l), {3, H, F}, true);
        angle_enc_[l] = nn::Mlp::create(params_, "enc.angle." + level_name(l), {4, H, F}, true);
    }
    for (std::size_t l = 0; l < L; ++l) {
        const bool bottom = l + 1 == L;
        if (l > 0) {
            pool_enc_[l] = nn::Mlp::create(params_, "enc.pool." + level_name(l), {4, H, F}, true);
            pool_[l] = mp_layer("pool." + level_name(l));
        }
        for (std::size_t k = 0; k < config_.mp_layers[l]; ++k) {
            down_[l].push_back(mp_layer("mp." + level_name(l) + (bottom ? ".bottom" : ".down") + std::to_string(k)));
        }
    }
    for (std::size_t l = L - 1; l-- > 0;) {
        unpool_[l] = nn::Mlp::create(params_, "unpool." + level_name(l) + ".fu", {2 * F, H, H, F}, true);
        for (std::size_t k = 0; k < config_.mp_layers[l]; ++k) {
            up_[l].push_back(mp_layer("mp." + level_name(l) + ".up" + std::to_string(k)));
        }
    }
    decoder_ = nn::Mlp::create(params_, "dec", {F, H, 1}, false);
    initialize(config_.seed);
}

std::vector<const nn::Mlp*> Model::all_mlps() const {
    std::vector<const nn::Mlp*> out;
    auto add_layers = [&](const std::vector<EdgeMpLayer>& layers) {
        for (const auto& layer : layers) {
            out.push_back(&layer.angle_update);
            out.push_back(&layer.edge_update);
        }
    };
    for (std::size_t l = 0; l < config_.levels; ++l) {
        out.push_back(&edge_enc_[l]);
        out.push_back(&angle_enc_[l]);
        if (l > 0) {
            out.push_back(&pool_enc_[l]);
            out.push_back(&pool_[l].angle_update);
            out.push_back(&pool_[l].edge_update);
        }
        add_layers(down_[l]);
        add_layers(up_[l]);
        if (l + 1 < config_.levels) out.push_back(&unpool_[l]);
    }
    out.push_back(&decoder_);
    return out;
}

void Model::initialize(std::uint64_t seed) {
    config_.seed = seed;
    for (const nn::Mlp* m : all_mlps()) m->initialize(params_, seed);
}

LatentState Model::encode_inputs(Tape& tape, const Hierarchy& h, const Matrix& field) const {
    if (h.depth() != config_.levels || h.kappa != config_.kappa) {
        throw Error(ErrorCode::InvalidArgument, "hierarchy depth/kappa do not match the model configuration");
    }
    if (field.rows() != static_cast<Eigen::Index>(h.levels[0].nodes.size()) || field.cols() != 2) {
        throw Error(ErrorCode::InvalidArgument, "field must be " + std::to_string(h.levels[0].nodes.size()) + " x 2");
    }
    LatentState state;
    for (std::size_t l = 0; l < h.depth(); ++l) {
        state.edges.push_back(
            edge_enc_[l].forward(tape, params_, tape.constant(raw_edge_attributes(h.levels[l], field))));
        state.angles.push_back(
            angle_enc_[l].forward(tape, params_, tape.constant(raw_angle_attributes(h.levels[l].angles))));
    }
    return state;
}

void Model::edge_mp(Tape& tape, const EdgeMpLayer& layer, const ModelPlan& plan, const Hierarchy& h,
                    std::size_t level, LatentState& state) const {
    const ModelPlan::Level& p = plan.levels[level];
    const Var& e = state.edges[level];
    const MlpInput angle_in[] = {{state.angles[level], nullptr}, {e, p.angle_in}, {e, p.angle_out}};
    state.angles[level] = layer.angle_update.forward(tape, params_, angle_in);
    const Var mean = nn::block_mean(tape, state.angles[level], h.kappa);
    const MlpInput edge_in[] = {{e, nullptr}, {mean, nullptr}};
    state.edges[level] = layer.edge_update.forward(tape, params_, edge_in);
}

void Model::edge_pool(Tape& tape, std::size_t level, const ModelPlan& plan, const Hierarchy& h,
                      LatentState& state) const {
    const ModelPlan::Level& p = plan.levels[level];
    const EdgeMpLayer& layer = pool_[level];
    const Var pool_angles = pool_enc_[level].forward(tape, params_, tape.constant(raw_angle_attributes(h.pool_angles[level])));
    const MlpInput angle_in[] = {
        {pool_angles, nullptr}, {state.edges[level - 1], p.pool_in}, {state.edges[level], p.pool_out}};
    const Var updated = layer.angle_update.forward(tape, params_, angle_in);
    const Var mean = nn::block_mean(tape, updated, h.kappa);
    const MlpInput edge_in[] = {{state.edges[level], nullptr}, {mean, nullptr}};
    state.edges[level] = layer.edge_update.forward(tape, params_, edge_in);
}

void Model::edge_unpool(Tape& tape, std::size_t level, const ModelPlan& plan, const Hierarchy& h,
                        LatentState& state) const {
    const Var coarse_nodes = graph::aggregate(tape, state.edges[level + 1], h.levels[level + 1].pinv);
    const Var fine_nodes = graph::interpolate(tape, coarse_nodes, plan.levels[level].interp);
    const Var projected = graph::project(tape, fine_nodes, h.levels[level].edges);
    const MlpInput in[] = {{state.edges[level], nullptr}, {projected, nullptr}};
    state.edges[level] = unpool_[level].forward(tape, params_, in);
}

Var Model::decode(Tape& tape, const LatentState& state) const { return decoder_.forward(tape, params_, state.edges[0]); }

Var Model::forward(Tape& tape, const Hierarchy& h, const ModelPlan& plan, const Matrix& field) const {
    const std::size_t L = config_.levels;
    LatentState state = encode_inputs(tape, h, field);
    for (std::size_t l = 0; l + 1 < L; ++l) {
        for (const EdgeMpLayer& layer : down_[l]) edge_mp(tape, layer, plan, h, l, state);
        edge_pool(tape, l + 1, plan, h, state);
    }
    for (const EdgeMpLayer& layer : down_[L - 1]) edge_mp(tape, layer, plan, h, L - 1, state);
    for (std::size_t l = L - 1; l-- > 0;) {
        edge_unpool(tape, l, plan, h, state);
        for (const EdgeMpLayer& layer : up_[l]) edge_mp(tape, layer, plan, h, l, state);
    }
    const Var scalars = decode(tape, state);
    return graph::aggregate(tape, scalars, h.levels[0].pinv);
}

Matrix forward_step(const Model& model, const Hierarchy& h, const ModelPlan& plan, const Matrix& field) {
    Tape tape(false);
    Matrix out = model.forward(tape, h, plan, field).value();
    if (!out.allFinite()) throw Error(ErrorCode::NonFiniteState, "forward step produced a non-finite field");
    return out;
}

Matrix forward_step(const Model& model, const Hierarchy& h, const Matrix& field) {
    return forward_step(model, h, ModelPlan::build(h), field);
}

std::vector<Matrix> rollout(const Model& model, const Hierarchy& h, const Matrix& initial, std::size_t steps) {
    if (steps < 1) throw Error(ErrorCode::InvalidArgument, "rollout needs at least one step");
    const ModelPlan plan = ModelPlan::build(h);
    std::vector<Matrix> out;
    out.reserve(steps);
    Matrix current = initial;
    for (std::size_t s = 0; s < steps; ++s) {
        Tape tape(false);
        current = model.forward(tape, h, plan, current).value();
        if (!current.allFinite()) {
            throw Error(ErrorCode::NonFiniteState, "non-finite field at rollout step " + std::to_string(s + 1));
        }
        out.push_back(current);
    }
    return out;
}

Matrix rotate_field(const Matrix& field, const Rotation& r) {
    Matrix out(field.rows(), 2);
    for (Eigen::Index i = 0; i < field.rows(); ++i) {
        const Vec2 v = r.rotate({field(i, 0), field(i, 1)});
        out(i, 0) = v.x;
        out(i, 1) = v.y;
    }
    return out;
}

Matrix to_matrix(std::span<const Vec2> field) {
    return Eigen::Map<const Matrix>(reinterpret_cast<const double*>(field.data()),
                                    static_cast<Eigen::Index>(field.size()), 2);
}

double equivariance_error(const Model& model, const NodeSet& nodes, const Matrix& field, const Rotation& rotation) {
    const std::size_t L = model.config().levels;
    const std::size_t kappa = model.config().kappa;
    const Hierarchy base = build_hierarchy(nodes, kappa, L);
    const Hierarchy moved = build_hierarchy(nodes.transformed(rotation), kappa, L);
    const Matrix expected = rotate_field(forward_step(model, base, field), rotation);
    const Matrix actual = forward_step(model, moved, rotate_field(field, rotation));
    const double denom = expected.norm();
    return denom > 0.0 ? (actual - expected).norm() / denom : (actual - expected).norm();
}

}  // namespace remus
