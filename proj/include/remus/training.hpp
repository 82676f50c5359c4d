// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "json.hpp"
#include "remus/data.hpp"
#include "remus/hierarchy.hpp"
#include "remus/model.hpp"

namespace remus {

struct TrainConfig {
    double dirichlet_weight = 0.25;
    double lr = 1e-4;
    double lr_factor = 0.5;
    std::size_t lr_patience = 2;
    double curriculum_threshold = 0.02;
    std::size_t initial_rollout_steps = 1;
    std::size_t max_rollout_steps = 10;
    std::size_t batch_size = 4;
    std::size_t epochs = 50;
    double clip_norm = 1.0;
    bool noise = true;
    std::uint64_t seed = 0;
    ModelConfig model;

    void validate() const;
    nlohmann::json to_json() const;
    /// Missing keys keep their defaults; unknown keys are rejected.
    static TrainConfig from_json(const nlohmann::json& j);
};

/// MSE over all nodes and components plus `dirichlet_weight` times the MAE
/// over Dirichlet-flagged nodes. Without Dirichlet nodes the MAE term is 0.
double loss(const Matrix& pred, const Matrix& truth, std::span<const std::uint8_t> dirichlet, double dirichlet_weight);

/// Differentiable form of loss(), multiplied by `scale`.
nn::Var loss(nn::Tape& tape, const nn::Var& pred, const Matrix& truth, std::span<const std::uint8_t> dirichlet,
             double dirichlet_weight, double scale = 1.0);

/// steps + 1 when the epoch loss is below the threshold and steps < max_steps.
std::size_t curriculum_update(std::size_t steps, double epoch_loss, double threshold = 0.02,
                              std::size_t max_steps = 10);

/// Halves the rate when `patience` consecutive epochs fail to improve on the
/// best earlier loss; the counter restarts after each reduction.
class PlateauScheduler {
public:
    explicit PlateauScheduler(double factor = 0.5, std::size_t patience = 2) : factor_(factor), patience_(patience) {}

    /// Records one epoch loss; returns the (possibly reduced) rate.
    double observe(double epoch_loss, double lr);

private:
    double factor_;
    std::size_t patience_;
    double best_ = 0.0;
    std::size_t bad_ = 0;
    bool started_ = false;
};

/// Rate after the last epoch of `history`, given the rate in effect before it.
double lr_schedule(std::span<const double> history, double lr, double factor = 0.5, std::size_t patience = 2);

/// A sample with its hierarchy and model plan, built once.
struct TrainingGraph {
    Sample sample;
    Hierarchy hierarchy;
    ModelPlan plan;

    static std::shared_ptr<const TrainingGraph> make(Sample sample, const ModelConfig& config);
};

struct StepResult {
    double loss = 0.0;
    Matrix prediction;
};

/// One forward step from `input`, scored against `truth`; accumulates
/// scale * d(loss)/d(params) into model.params().grads().
StepResult accumulate_step(const Model& model, const TrainingGraph& graph, const Matrix& input, const Matrix& truth,
                           double dirichlet_weight, double scale = 1.0);

/// Noise-free rollout loss from time index t0, averaged over `steps`.
double rollout_loss(const Model& model, const TrainingGraph& graph, std::size_t t0, std::size_t steps,
                    double dirichlet_weight);

/// Per-step MAE of a rollout against the stored fields.
std::vector<double> rollout_mae(const Model& model, const TrainingGraph& graph, std::size_t t0, std::size_t steps);

using MetricsSink = std::function<void(const nlohmann::json&)>;

struct TrainResult {
    std::vector<nlohmann::json> metrics;  // one record per epoch
    double lr = 0.0;
    std::size_t rollout_steps = 0;
};

/// Throws NonFiniteLoss naming the iteration index.
TrainResult train(Model& model, std::span<const std::shared_ptr<const TrainingGraph>> train_set,
                  std::span<const std::shared_ptr<const TrainingGraph>> val_set, const TrainConfig& config,
                  const MetricsSink& sink = {});

}  // namespace remus
