#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hydrolstm/config.hpp"
#include "hydrolstm/data_io.hpp"
#include "hydrolstm/grad.hpp"
#include "hydrolstm/lstm.hpp"

namespace hydrolstm {

struct TrainConfig {
    std::size_t epochs = 50;
    double learning_rate = 1e-2;
    double rmsprop_decay = 0.9;
    double rmsprop_epsilon = 1e-7;
    std::size_t batch_size = 256;
    std::uint64_t seed = 0;
    double gradient_clip_norm = 1.0;  // <= 0 disables clipping

    /// Throws InvalidArgument on out-of-range fields.
    void validate() const;

    /// Reads the keys named after the fields above; absent keys keep their defaults.
    static TrainConfig from(const KeyValues& kv);
};

/// Mean squared error. Throws LengthMismatch on empty or unequal inputs.
double mse(std::span<const double> predictions, std::span<const double> targets);

struct RmspropState {
    std::vector<double> mean_square;  // running average of squared (clipped) gradients

    static RmspropState zeros(std::size_t n) { return {std::vector<double>(n, 0.0)}; }
};

struct RmspropUpdate {
    ModelParams params;
    RmspropState state;
};

/// Rescales `grads` to global L2 norm `max_norm` when it is larger; identity if max_norm <= 0.
ParamGradient clip_by_global_norm(const ParamGradient& grads, double max_norm);

/// v' = decay v + (1 - decay) g^2; theta' = theta - lr g / (sqrt(v') + eps), after global-norm clipping.
RmspropUpdate rmsprop_step(const ModelParams& params, const ParamGradient& grads, const RmspropState& state,
                           const TrainConfig& config);

struct EpochRecord {
    std::size_t epoch = 0;  // 0-based
    double train_loss = 0.0;
    double validation_nse = 0.0;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    std::size_t selected_epoch = 0;  // argmax of validation NSE, earliest on ties
    ModelParams params;              // parameters at the end of the selected epoch
};

using EpochCallback = std::function<void(const EpochRecord&, const ModelParams&)>;

/// Predictions for every sample (parallel over samples, result in sample order).
std::vector<double> predict_all(const ModelParams& params, std::span<const Sample> samples);

/// NSE of the samples' predictions against their targets after mapping both back through `scale`.
double sample_nse(const ModelParams& params, std::span<const Sample> samples, const VariableStats& scale);

/// Mini-batch RMSprop on MSE with per-epoch seeded shuffling and validation-NSE model selection.
/// `target_scale` maps normalized targets back to discharge for the selection metric.
/// Throws DivergedTraining when the loss or state becomes non-finite.
TrainReport train(std::span<const Sample> train_samples, std::span<const Sample> validation_samples,
                  const TrainConfig& config, ModelShape shape = {}, const VariableStats& target_scale = {},
                  const EpochCallback& on_epoch = {});

}  // namespace hydrolstm
