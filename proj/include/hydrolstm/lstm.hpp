#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "hydrolstm/matrix.hpp"

namespace hydrolstm {

struct ModelShape {
    std::size_t input_dim = 5;
    std::size_t hidden = 10;

    /// 4 gates x (input weights + recurrent weights + bias) plus the dense head.
    std::size_t parameter_count() const { return 4 * (hidden * input_dim + hidden * hidden + hidden) + hidden + 1; }
    friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

/// Gate order inside every stacked 4H block.
enum class Gate : std::size_t { Input = 0, Forget = 1, Cell = 2, Output = 3 };
inline constexpr std::array<Gate, 4> kGates = {Gate::Input, Gate::Forget, Gate::Cell, Gate::Output};
inline constexpr std::array<std::string_view, 4> kGateSuffix = {"i", "f", "g", "o"};

/// Flat parameter vector with named views for one LSTM layer plus a linear dense head.
///
/// Layout (row-major, gate-major within each block):
///   W  [4H x D]   input weights, rows g*H + unit
///   U  [4H x H]   recurrent weights
///   b  [4H]       gate biases
///   w_d[H]        dense weights
///   b_d           dense bias
///
/// `Tag` keeps parameters and their gradients distinct types over the same layout.
template <class Tag>
class ParameterBlock {
public:
    ParameterBlock() = default;
    explicit ParameterBlock(ModelShape shape) : shape_(shape), values_(shape.parameter_count(), 0.0) {}

    const ModelShape& shape() const noexcept { return shape_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& w(Gate g, std::size_t unit, std::size_t input) { return values_[w_index(g, unit, input)]; }
    double w(Gate g, std::size_t unit, std::size_t input) const { return values_[w_index(g, unit, input)]; }
    double& u(Gate g, std::size_t unit, std::size_t from) { return values_[u_index(g, unit, from)]; }
    double u(Gate g, std::size_t unit, std::size_t from) const { return values_[u_index(g, unit, from)]; }
    double& bias(Gate g, std::size_t unit) { return values_[b_offset() + row(g, unit)]; }
    double bias(Gate g, std::size_t unit) const { return values_[b_offset() + row(g, unit)]; }
    double& dense_weight(std::size_t unit) { return values_[dense_offset() + unit]; }
    double dense_weight(std::size_t unit) const { return values_[dense_offset() + unit]; }
    double& dense_bias() { return values_.back(); }
    double dense_bias() const { return values_.back(); }

    /// Stacked views used by the kernels.
    const double* input_weights() const { return values_.data(); }
    const double* recurrent_weights() const { return values_.data() + u_offset(); }
    const double* biases() const { return values_.data() + b_offset(); }
    const double* dense_weights() const { return values_.data() + dense_offset(); }
    double* input_weights() { return values_.data(); }
    double* recurrent_weights() { return values_.data() + u_offset(); }
    double* biases() { return values_.data() + b_offset(); }
    double* dense_weights() { return values_.data() + dense_offset(); }

    std::size_t u_offset() const { return 4 * shape_.hidden * shape_.input_dim; }
    std::size_t b_offset() const { return u_offset() + 4 * shape_.hidden * shape_.hidden; }
    std::size_t dense_offset() const { return b_offset() + 4 * shape_.hidden; }

    friend bool operator==(const ParameterBlock&, const ParameterBlock&) = default;

private:
    std::size_t row(Gate g, std::size_t unit) const { return static_cast<std::size_t>(g) * shape_.hidden + unit; }
    std::size_t w_index(Gate g, std::size_t unit, std::size_t input) const {
        return row(g, unit) * shape_.input_dim + input;
    }
    std::size_t u_index(Gate g, std::size_t unit, std::size_t from) const {
        return u_offset() + row(g, unit) * shape_.hidden + from;
    }

    ModelShape shape_;
    std::vector<double> values_;
};

using ModelParams = ParameterBlock<struct ModelParamsTag>;
using ParamGradient = ParameterBlock<struct ParamGradientTag>;

/// Uniform(+-1/sqrt(fan_in)) weights from a seeded generator. Gate fan-in is input_dim + hidden
/// (the concatenated [x, h] feeding each gate), dense fan-in is hidden. Biases are zero except
/// the forget gate, which starts at 1.
ModelParams init_params(std::uint64_t seed, ModelShape shape = {});
double gate_init_bound(const ModelShape& shape);
double dense_init_bound(const ModelShape& shape);

struct CellState {
    std::vector<double> c;
    std::vector<double> h;

    static CellState zeros(std::size_t hidden) { return {std::vector<double>(hidden), std::vector<double>(hidden)}; }
};

struct GateActivations {
    std::vector<double> input;
    std::vector<double> forget;
    std::vector<double> cell;  // candidate g, in (-1, 1)
    std::vector<double> output;
};

struct StepResult {
    CellState state;
    GateActivations gates;
};

/// One LSTM recurrence step. Throws NonFiniteState when c or h is not finite.
StepResult lstm_step(std::span<const double> x, const CellState& prev, const ModelParams& params);

/// Cached activations of a full forward pass, indexed by 0-based timestep.
class ForwardTrace {
public:
    ForwardTrace(std::size_t seq_len, ModelShape shape);

    std::size_t seq_len() const noexcept { return seq_len_; }
    std::size_t hidden() const noexcept { return shape_.hidden; }
    const ModelShape& shape() const noexcept { return shape_; }

    const Matrix& inputs() const { return inputs_; }
    /// Row t holds [i | f | g | o], each `hidden` wide.
    const Matrix& gates() const { return gates_; }
    const Matrix& cells() const { return cells_; }
    const Matrix& hiddens() const { return hiddens_; }
    double prediction() const { return prediction_; }

    double gate(std::size_t t, Gate g, std::size_t unit) const {
        return gates_(t, static_cast<std::size_t>(g) * shape_.hidden + unit);
    }
    /// c_{t-1}; zero before the first step.
    double prev_cell(std::size_t t, std::size_t unit) const { return t == 0 ? 0.0 : cells_(t - 1, unit); }
    double prev_hidden(std::size_t t, std::size_t unit) const { return t == 0 ? 0.0 : hiddens_(t - 1, unit); }

private:
    friend ForwardTrace forward(ConstMatrixView inputs, const ModelParams& params);

    std::size_t seq_len_;
    ModelShape shape_;
    Matrix inputs_;
    Matrix gates_;
    Matrix cells_;
    Matrix hiddens_;
    double prediction_ = 0.0;
};

/// Full pass from zero initial state; y = w_d . h_T + b_d.
/// Throws NonFiniteState naming the first offending (1-based) timestep.
ForwardTrace forward(ConstMatrixView inputs, const ModelParams& params);

/// Prediction only, without keeping the trace.
double predict(ConstMatrixView inputs, const ModelParams& params);

}  // namespace hydrolstm
