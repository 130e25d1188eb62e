#include "hydrolstm/training.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "hydrolstm/error.hpp"
#include "hydrolstm/metrics.hpp"
#include "hydrolstm/parallel.hpp"

namespace hydrolstm {

void TrainConfig::validate() const {
    if (epochs < 1) fail(ErrorKind::InvalidArgument, "epochs must be >= 1");
    if (!(learning_rate > 0.0)) fail(ErrorKind::InvalidArgument, "learning_rate must be > 0");
    if (!(rmsprop_decay > 0.0 && rmsprop_decay < 1.0))
        fail(ErrorKind::InvalidArgument, "rmsprop_decay must lie in (0, 1)");
    if (!(rmsprop_epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "rmsprop_epsilon must be > 0");
    if (batch_size < 1) fail(ErrorKind::InvalidArgument, "batch_size must be >= 1");
}

TrainConfig TrainConfig::from(const KeyValues& kv) {
    TrainConfig c;
    const auto epochs = kv.get_int("epochs", static_cast<std::int64_t>(c.epochs));
    const auto batch = kv.get_int("batch_size", static_cast<std::int64_t>(c.batch_size));
    if (epochs < 1 || batch < 1) fail(ErrorKind::InvalidArgument, "epochs and batch_size must be >= 1");
    c.epochs = static_cast<std::size_t>(epochs);
    c.batch_size = static_cast<std::size_t>(batch);
    c.learning_rate = kv.get_double("learning_rate", c.learning_rate);
    c.rmsprop_decay = kv.get_double("rmsprop_decay", c.rmsprop_decay);
    c.rmsprop_epsilon = kv.get_double("rmsprop_epsilon", c.rmsprop_epsilon);
    c.seed = kv.get_uint("seed", c.seed);
    c.gradient_clip_norm = kv.get_double("gradient_clip_norm", c.gradient_clip_norm);
    c.validate();
    return c;
}

double mse(std::span<const double> predictions, std::span<const double> targets) {
    if (predictions.size() != targets.size() || predictions.empty())
        fail(ErrorKind::LengthMismatch, "mse: " + std::to_string(predictions.size()) + " predictions vs " +
                                            std::to_string(targets.size()) + " targets");
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double e = predictions[i] - targets[i];
        sum += e * e;
    }
    return sum / static_cast<double>(predictions.size());
}

ParamGradient clip_by_global_norm(const ParamGradient& grads, double max_norm) {
    ParamGradient out = grads;
    if (max_norm <= 0.0) return out;
    double sq = 0.0;
    for (double g : grads.values()) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale = max_norm / norm;
        for (double& g : out.values()) g *= scale;
    }
    return out;
}

RmspropUpdate rmsprop_step(const ModelParams& params, const ParamGradient& grads, const RmspropState& state,
                           const TrainConfig& config) {
    if (grads.shape() != params.shape() || state.mean_square.size() != params.size())
        fail(ErrorKind::ShapeMismatch, "rmsprop_step: parameter, gradient and state shapes differ");
    const ParamGradient g = clip_by_global_norm(grads, config.gradient_clip_norm);
    RmspropUpdate out{params, state};
    auto theta = out.params.values();
    auto& v = out.state.mean_square;
    const auto gv = g.values();
    const double decay = config.rmsprop_decay;
    for (std::size_t k = 0; k < theta.size(); ++k) {
        v[k] = decay * v[k] + (1.0 - decay) * gv[k] * gv[k];
        theta[k] -= config.learning_rate * gv[k] / (std::sqrt(v[k]) + config.rmsprop_epsilon);
    }
    return out;
}

std::vector<double> predict_all(const ModelParams& params, std::span<const Sample> samples) {
    std::vector<double> out(samples.size());
    parallel_for(samples.size(), [&](std::size_t k) { out[k] = predict(samples[k].inputs(), params); });
    return out;
}

double sample_nse(const ModelParams& params, std::span<const Sample> samples, const VariableStats& scale) {
    const auto predictions = predict_all(params, samples);
    std::vector<double> sim(samples.size()), obs(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        if (!samples[k].target) fail(ErrorKind::InvalidArgument, "sample without target");
        sim[k] = scale.denormalize(predictions[k]);
        obs[k] = scale.denormalize(*samples[k].target);
    }
    return nse(sim, obs);
}

namespace {

/// Fisher-Yates with a portable index draw, so the order depends only on the seed.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
}

}  // namespace

TrainReport train(std::span<const Sample> train_samples, std::span<const Sample> validation_samples,
                  const TrainConfig& config, ModelShape shape, const VariableStats& target_scale,
                  const EpochCallback& on_epoch) {
    config.validate();
    if (train_samples.empty() || validation_samples.empty())
        fail(ErrorKind::InvalidArgument, "training and validation sets must be non-empty");

    ModelParams params = init_params(config.seed, shape);
    RmspropState state = RmspropState::zeros(params.size());
    std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(train_samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    TrainReport report{{}, 0, params};
    double best_nse = -std::numeric_limits<double>::infinity();
    std::vector<Sample> batch;
    batch.reserve(config.batch_size);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        shuffle_indices(order, shuffle_rng);
        double loss_sum = 0.0;
        try {
            for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
                const std::size_t end = std::min(order.size(), begin + config.batch_size);
                batch.clear();
                for (std::size_t k = begin; k < end; ++k) batch.push_back(train_samples[order[k]]);
                const auto g = grad_wrt_params(params, batch);
                loss_sum += g.loss * static_cast<double>(batch.size());
                auto update = rmsprop_step(params, g.gradient, state, config);
                params = std::move(update.params);
                state = std::move(update.state);
            }
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NonFiniteState || e.kind() == ErrorKind::NonFiniteGradient)
                fail(ErrorKind::DivergedTraining, "epoch " + std::to_string(epoch) + ": " + e.what());
            throw;
        }
        const double train_loss = loss_sum / static_cast<double>(order.size());
        if (!std::isfinite(train_loss))
            fail(ErrorKind::DivergedTraining, "non-finite training loss in epoch " + std::to_string(epoch));

        double val_nse = 0.0;
        try {
            val_nse = sample_nse(params, validation_samples, target_scale);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::NonFiniteState)
                fail(ErrorKind::DivergedTraining, "epoch " + std::to_string(epoch) + ": " + e.what());
            throw;
        }
        const EpochRecord record{epoch, train_loss, val_nse};
        report.epochs.push_back(record);
        if (val_nse > best_nse) {
            best_nse = val_nse;
            report.selected_epoch = epoch;
            report.params = params;
        }
        if (on_epoch) on_epoch(record, params);
    }
    return report;
}

}  // namespace hydrolstm
