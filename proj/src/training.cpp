// Copyright (c) 2026, The remus-gnn authors
// SPDX-License-Identifier: Apache-2.0

#include "remus/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "remus/error.hpp"
#include "remus/nn/optim.hpp"

namespace remus {

namespace {

void check_shapes(const Matrix& pred, const Matrix& truth, std::span<const std::uint8_t> dirichlet) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols() ||
        dirichlet.size() != static_cast<std::size_t>(pred.rows())) {
        throw Error(ErrorCode::InvalidArgument, "loss inputs disagree in shape");
    }
}

std::size_t dirichlet_count(std::span<const std::uint8_t> dirichlet) {
    return static_cast<std::size_t>(std::count_if(dirichlet.begin(), dirichlet.end(), [](auto f) { return f != 0; }));
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void TrainConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, "train config: " + what); };
    if (!(dirichlet_weight >= 0.0)) fail("dirichlet_weight must be non-negative");
    if (!(lr > 0.0)) fail("lr must be positive");
    if (!(lr_factor > 0.0 && lr_factor < 1.0)) fail("lr_factor must be in (0, 1)");
    if (lr_patience == 0) fail("lr_patience must be positive");
    if (!(curriculum_threshold > 0.0 && curriculum_threshold < 1.0)) fail("curriculum_threshold must be in (0, 1)");
    if (initial_rollout_steps == 0 || initial_rollout_steps > max_rollout_steps) {
        fail("initial_rollout_steps must be in [1, max_rollout_steps]");
    }
    if (batch_size == 0) fail("batch_size must be positive");
    if (!(clip_norm > 0.0)) fail("clip_norm must be positive");
    model.validate();
}

nlohmann::json TrainConfig::to_json() const {
    return {{"dirichlet_weight", dirichlet_weight},
            {"lr", lr},
            {"lr_factor", lr_factor},
            {"lr_patience", lr_patience},
            {"curriculum_threshold", curriculum_threshold},
            {"initial_rollout_steps", initial_rollout_steps},
            {"max_rollout_steps", max_rollout_steps},
            {"batch_size", batch_size},
            {"epochs", epochs},
            {"clip_norm", clip_norm},
            {"noise", noise},
            {"seed", seed},
            {"model", model.to_json()}};
}

TrainConfig TrainConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "train config must be a JSON object");
    TrainConfig c;
    const nlohmann::json defaults = c.to_json();
    for (const auto& [key, value] : j.items()) {
        if (!defaults.contains(key)) throw Error(ErrorCode::ParseError, "train config: unknown key '" + key + "'");
    }
    try {
        c.dirichlet_weight = j.value("dirichlet_weight", c.dirichlet_weight);
        c.lr = j.value("lr", c.lr);
        c.lr_factor = j.value("lr_factor", c.lr_factor);
        c.lr_patience = j.value("lr_patience", c.lr_patience);
        c.curriculum_threshold = j.value("curriculum_threshold", c.curriculum_threshold);
        c.initial_rollout_steps = j.value("initial_rollout_steps", c.initial_rollout_steps);
        c.max_rollout_steps = j.value("max_rollout_steps", c.max_rollout_steps);
        c.batch_size = j.value("batch_size", c.batch_size);
        c.epochs = j.value("epochs", c.epochs);
        c.clip_norm = j.value("clip_norm", c.clip_norm);
        c.noise = j.value("noise", c.noise);
        c.seed = j.value("seed", c.seed);
        if (j.contains("model")) c.model = ModelConfig::from_json(j.at("model"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("train config: ") + e.what());
    }
    c.validate();
    return c;
}

double loss(const Matrix& pred, const Matrix& truth, std::span<const std::uint8_t> dirichlet, double dirichlet_weight) {
    check_shapes(pred, truth, dirichlet);
    const Matrix diff = pred - truth;
    const double mse = diff.squaredNorm() / static_cast<double>(diff.size());
    const std::size_t nd = dirichlet_count(dirichlet);
    if (nd == 0) return mse;
    double mae = 0.0;
    for (Eigen::Index i = 0; i < diff.rows(); ++i) {
        if (dirichlet[static_cast<std::size_t>(i)]) mae += diff.row(i).cwiseAbs().sum();
    }
    return mse + dirichlet_weight * mae / static_cast<double>(nd * diff.cols());
}

nn::Var loss(nn::Tape& tape, const nn::Var& pred, const Matrix& truth, std::span<const std::uint8_t> dirichlet,
             double dirichlet_weight, double scale) {
    Matrix value(1, 1);
    value(0, 0) = scale * loss(pred.value(), truth, dirichlet, dirichlet_weight);
    Matrix diff = pred.value() - truth;
    const std::size_t nd = dirichlet_count(dirichlet);
    std::vector<std::uint8_t> mask(dirichlet.begin(), dirichlet.end());
    auto node = pred.node();
    return tape.record(std::move(value), {&pred},
                       [node, diff = std::move(diff), mask = std::move(mask), nd, dirichlet_weight,
                        scale](const Matrix& g) {
                           const double s = g(0, 0) * scale;
                           Matrix& out = nn::grad_buffer(*node);
                           out += (2.0 * s / static_cast<double>(diff.size())) * diff;
                           if (nd == 0) return;
                           const double w = s * dirichlet_weight / static_cast<double>(nd * diff.cols());
                           for (Eigen::Index i = 0; i < diff.rows(); ++i) {
                               if (!mask[static_cast<std::size_t>(i)]) continue;
                               for (Eigen::Index c = 0; c < diff.cols(); ++c) out(i, c) += w * sign(diff(i, c));
                           }
                       });
}

std::size_t curriculum_update(std::size_t steps, double epoch_loss, double threshold, std::size_t max_steps) {
    if (steps < 1) throw Error(ErrorCode::InvalidArgument, "rollout steps must be at least 1");
    return epoch_loss < threshold && steps < max_steps ? steps + 1 : steps;
}

double PlateauScheduler::observe(double epoch_loss, double lr) {
    if (!started_ || epoch_loss < best_) {
        best_ = epoch_loss;
        bad_ = 0;
        started_ = true;
        return lr;
    }
    if (++bad_ < patience_) return lr;
    bad_ = 0;
    return lr * factor_;
}

double lr_schedule(std::span<const double> history, double lr, double factor, std::size_t patience) {
    if (history.empty()) throw Error(ErrorCode::InvalidArgument, "lr_schedule needs at least one epoch loss");
    PlateauScheduler replay(factor, patience);
    double reduced = 1.0;
    for (std::size_t i = 0; i < history.size(); ++i) {
        const double next = replay.observe(history[i], 1.0);
        if (i + 1 == history.size()) reduced = next;
    }
    return lr * reduced;
}

std::shared_ptr<const TrainingGraph> TrainingGraph::make(Sample sample, const ModelConfig& config) {
    auto g = std::make_shared<TrainingGraph>();
    g->sample = std::move(sample);
    g->hierarchy = build_hierarchy(g->sample.nodes, config.kappa, config.levels);
    g->plan = ModelPlan::build(g->hierarchy);
    return g;
}

StepResult accumulate_step(const Model& model, const TrainingGraph& graph, const Matrix& input, const Matrix& truth,
                           double dirichlet_weight, double scale) {
    nn::Tape tape(true);
    const nn::Var pred = model.forward(tape, graph.hierarchy, graph.plan, input);
    const nn::Var l = loss(tape, pred, truth, graph.sample.nodes.dirichlet, dirichlet_weight, scale);
    StepResult out{l.value()(0, 0) / scale, pred.value()};
    tape.backward(l);
    return out;
}

double rollout_loss(const Model& model, const TrainingGraph& graph, std::size_t t0, std::size_t steps,
                    double dirichlet_weight) {
    const FieldSeries& f = graph.sample.fields;
    if (t0 + steps >= f.steps) throw Error(ErrorCode::InvalidArgument, "rollout window exceeds the series");
    Matrix state = f.frame(t0);
    double total = 0.0;
    for (std::size_t s = 1; s <= steps; ++s) {
        state = forward_step(model, graph.hierarchy, graph.plan, state);
        total += loss(state, f.frame(t0 + s), graph.sample.nodes.dirichlet, dirichlet_weight);
    }
    return total / static_cast<double>(steps);
}

std::vector<double> rollout_mae(const Model& model, const TrainingGraph& graph, std::size_t t0, std::size_t steps) {
    const FieldSeries& f = graph.sample.fields;
    if (t0 + steps >= f.steps) throw Error(ErrorCode::InvalidArgument, "rollout window exceeds the series");
    const std::vector<Matrix> pred = rollout(model, graph.hierarchy, f.frame(t0), steps);
    std::vector<double> mae;
    for (std::size_t s = 0; s < steps; ++s) {
        mae.push_back((pred[s] - f.frame(t0 + s + 1)).cwiseAbs().mean());
    }
    return mae;
}

TrainResult train(Model& model, std::span<const std::shared_ptr<const TrainingGraph>> train_set,
                  std::span<const std::shared_ptr<const TrainingGraph>> val_set, const TrainConfig& config,
                  const MetricsSink& sink) {
    config.validate();
    if (train_set.empty()) throw Error(ErrorCode::InvalidArgument, "training set is empty");
    std::size_t shortest = train_set.front()->sample.fields.steps;
    for (const auto& g : train_set) shortest = std::min(shortest, g->sample.fields.steps);
    const std::size_t step_cap = std::min(config.max_rollout_steps, shortest - 1);

    nn::ParamStore& params = model.params();
    nn::AdamState adam(params.size(), config.lr);
    PlateauScheduler scheduler(config.lr_factor, config.lr_patience);
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainResult result;
    result.lr = config.lr;
    result.rollout_steps = std::min(config.initial_rollout_steps, step_cap);
    std::uint64_t iteration = 0;

    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        const std::size_t steps = result.rollout_steps;
        double epoch_loss = 0.0;
        double epoch_grad_norm = 0.0;
        std::size_t batches = 0;
        std::size_t updates = 0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size, ++iteration) {
            const std::size_t count = std::min(config.batch_size, order.size() - begin);
            std::vector<const TrainingGraph*> batch;
            std::vector<std::size_t> starts;
            std::vector<Matrix> states;
            for (std::size_t b = 0; b < count; ++b) {
                const TrainingGraph& g = *train_set[order[begin + b]];
                const std::size_t last_start = g.sample.fields.steps - 1 - steps;
                const std::size_t t0 = std::uniform_int_distribution<std::size_t>(0, last_start)(rng);
                const std::uint64_t noise_seed = rng();
                Matrix initial = g.sample.fields.frame(t0);
                if (config.noise) initial = add_noise(initial, noise_seed);
                batch.push_back(&g);
                starts.push_back(t0);
                states.push_back(std::move(initial));
            }

            double batch_loss = 0.0;
            for (std::size_t s = 1; s <= steps; ++s) {
                params.zero_grad();
                double step_loss = 0.0;
                for (std::size_t b = 0; b < count; ++b) {
                    const Matrix truth = batch[b]->sample.fields.frame(starts[b] + s);
                    StepResult r = accumulate_step(model, *batch[b], states[b], truth, config.dirichlet_weight,
                                                   1.0 / static_cast<double>(count));
                    step_loss += r.loss / static_cast<double>(count);
                    states[b] = std::move(r.prediction);
                }
                if (!std::isfinite(step_loss)) {
                    throw Error(ErrorCode::NonFiniteLoss, "non-finite loss at iteration " + std::to_string(iteration) +
                                                              " (epoch " + std::to_string(epoch) + ", step " +
                                                              std::to_string(s) + ")");
                }
                epoch_grad_norm += nn::clip_gradients(params.grads(), config.clip_norm);
                adam.lr = result.lr;
                nn::adam_step(params.values(), params.grads(), adam);
                batch_loss += step_loss;
                ++updates;
            }
            epoch_loss += batch_loss / static_cast<double>(steps);
            ++batches;
        }
        epoch_loss /= static_cast<double>(batches);

        nlohmann::json record = {{"epoch", epoch},
                                 {"loss", epoch_loss},
                                 {"lr", result.lr},
                                 {"rollout_steps", steps},
                                 {"grad_norm", epoch_grad_norm / static_cast<double>(updates)},
                                 {"iterations", iteration}};
        if (!val_set.empty()) {
            double val = 0.0;
            for (const auto& g : val_set) {
                const std::size_t vs = std::min(steps, g->sample.fields.steps - 1);
                val += rollout_loss(model, *g, 0, vs, config.dirichlet_weight);
            }
            record["val_loss"] = val / static_cast<double>(val_set.size());
        }
        if (sink) sink(record);
        result.metrics.push_back(std::move(record));

        result.rollout_steps =
            curriculum_update(steps, epoch_loss, config.curriculum_threshold, step_cap);
        result.lr = scheduler.observe(epoch_loss, result.lr);
    }
    return result;
}

}  // namespace remus
