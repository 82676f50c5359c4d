// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0
//
// The rotation-equivariant multi-scale network. All learned functions see
// only rotation-invariant scalars (edge projections, lengths, angle cosines
// and sines); the only direction-dependent steps are the projection of the
// input field, the projection-aggregation of the decoder output and the
// aggregate -> interpolate -> project chain inside edge-unpooling, which
// is invariant as a whole.
//
// Vector fields are n x 2 matrices over the level-0 nodes.

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "json.hpp"
#include "remus/graph_ops.hpp"
#include "remus/hierarchy.hpp"
#include "remus/matrix.hpp"
#include "remus/nn/layers.hpp"
#include "remus/nn/mlp.hpp"
#include "remus/nn/param_store.hpp"

namespace remus {

struct ModelConfig {
    std::size_t levels = 3;
    std::size_t kappa = 5;
    std::size_t hidden = 128;
    std::size_t features = 128;
    /// Message-passing layers per level. Every level above the coarsest runs
    /// its count twice, once on the way down and once on the way up.
    std::vector<std::size_t> mp_layers{4, 2, 4};
    std::uint64_t seed = 0;

    void validate() const;
    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json& j);
};

/// Index structures for one hierarchy, shared by every forward pass over it.
struct ModelPlan {
    struct Level {
        std::shared_ptr<const nn::GatherIndex> angle_in;   // angle -> incoming edge (i,j)
        std::shared_ptr<const nn::GatherIndex> angle_out;  // angle -> outgoing edge (j,k)
        std::shared_ptr<const nn::GatherIndex> pool_in;    // pool angle -> fine edge (level l-1)
        std::shared_ptr<const nn::GatherIndex> pool_out;   // pool angle -> coarse edge
        std::shared_ptr<const graph::InterpPlan> interp;   // level l -> level l+1 stencils
    };
    std::vector<Level> levels;

    static ModelPlan build(const Hierarchy& h);
};

/// Edge and angle feature tables per level; pool-angle features are
/// re-encoded at each pooling layer and therefore not part of the state.
struct LatentState {
    std::vector<nn::Var> edges;
    std::vector<nn::Var> angles;
};

struct EdgeMpLayer {
    nn::Mlp angle_update;  // f^a
    nn::Mlp edge_update;   // f^e
};

/// [u_ij, p(x_j), omega_j] for every edge of `level`; `field` lives on level 0.
Matrix raw_edge_attributes(const LevelGraph& level, const Matrix& field);
/// [|x_j - x_i|, |x_k - x_j|, cos, sin] per angle.
Matrix raw_angle_attributes(const AngleSet& angles);

class Model {
public:
    explicit Model(ModelConfig config);

    const ModelConfig& config() const { return config_; }
    nn::ParamStore& params() { return params_; }
    const nn::ParamStore& params() const { return params_; }
    std::size_t parameter_count() const { return params_.size(); }

    /// Re-initializes every parameter from `seed`.
    void initialize(std::uint64_t seed);

    LatentState encode_inputs(nn::Tape& tape, const Hierarchy& h, const Matrix& field) const;

    /// One directional message-passing layer over the edges and angles of `level`.
    void edge_mp(nn::Tape& tape, const EdgeMpLayer& layer, const ModelPlan& plan, const Hierarchy& h,
                 std::size_t level, LatentState& state) const;
    /// Pools level-1 edge features into the edges of `level`.
    void edge_pool(nn::Tape& tape, std::size_t level, const ModelPlan& plan, const Hierarchy& h,
                   LatentState& state) const;
    /// Unpools edge features of level+1 into the edges of `level`.
    void edge_unpool(nn::Tape& tape, std::size_t level, const ModelPlan& plan, const Hierarchy& h,
                     LatentState& state) const;
    /// Decoder output u'_ij on the level-0 edges (|E| x 1).
    nn::Var decode(nn::Tape& tape, const LatentState& state) const;

    /// Predicted field at t0 + dt (n x 2).
    nn::Var forward(nn::Tape& tape, const Hierarchy& h, const ModelPlan& plan, const Matrix& field) const;

    // Layer access for tests and tooling.
    const std::vector<EdgeMpLayer>& down_layers(std::size_t level) const { return down_[level]; }
    const std::vector<EdgeMpLayer>& up_layers(std::size_t level) const { return up_[level]; }
    const EdgeMpLayer& pool_layer(std::size_t level) const { return pool_[level]; }
    const nn::Mlp& unpool_mlp(std::size_t level) const { return unpool_[level]; }
    const nn::Mlp& decoder() const { return decoder_; }
    const nn::Mlp& edge_encoder(std::size_t level) const { return edge_enc_[level]; }
    const nn::Mlp& angle_encoder(std::size_t level) const { return angle_enc_[level]; }
    const nn::Mlp& pool_encoder(std::size_t level) const { return pool_enc_[level]; }

private:
    std::vector<const nn::Mlp*> all_mlps() const;

    ModelConfig config_;
    nn::ParamStore params_;
    std::vector<nn::Mlp> edge_enc_;
    std::vector<nn::Mlp> angle_enc_;
    std::vector<nn::Mlp> pool_enc_;  // index l >= 1
    std::vector<std::vector<EdgeMpLayer>> down_;  // coarsest level: the bottom stack
    std::vector<std::vector<EdgeMpLayer>> up_;
    std::vector<EdgeMpLayer> pool_;  // index l >= 1
    std::vector<nn::Mlp> unpool_;    // index l < levels-1
    nn::Mlp decoder_;
};

/// One time step u(t0) -> u(t0 + dt). Throws NonFiniteState on a non-finite output.
Matrix forward_step(const Model& model, const Hierarchy& h, const Matrix& field);
Matrix forward_step(const Model& model, const Hierarchy& h, const ModelPlan& plan, const Matrix& field);

/// Iterated forward_step; element s holds the field after s + 1 steps.
/// Throws NonFiniteState naming the step index.
std::vector<Matrix> rollout(const Model& model, const Hierarchy& h, const Matrix& initial, std::size_t steps);

/// Relative L2 gap between rotate-then-infer and infer-then-rotate for one rotation.
double equivariance_error(const Model& model, const NodeSet& nodes, const Matrix& field, const Rotation& rotation);

/// Node field helpers.
Matrix rotate_field(const Matrix& field, const Rotation& rotation);
Matrix to_matrix(std::span<const Vec2> field);

}  // namespace remus
