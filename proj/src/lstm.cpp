#include "hydrolstm/lstm.hpp"

#include <cmath>
#include <random>

#include "hydrolstm/error.hpp"

namespace hydrolstm {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Uniform [0, 1) from the top 53 bits, independent of the standard library's distributions.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// gates <- [sigma, sigma, tanh, sigma](W x + U h_prev + b); c, h updated from c_prev.
void step_kernel(const ModelParams& p, const double* x, const double* h_prev, const double* c_prev, double* gates,
                 double* c, double* h) {
    const std::size_t H = p.shape().hidden;
    const std::size_t D = p.shape().input_dim;
    const double* W = p.input_weights();
    const double* U = p.recurrent_weights();
    const double* b = p.biases();
    for (std::size_t r = 0; r < 4 * H; ++r) {
        double z = b[r];
        const double* wr = W + r * D;
        for (std::size_t k = 0; k < D; ++k) z += wr[k] * x[k];
        const double* ur = U + r * H;
        for (std::size_t k = 0; k < H; ++k) z += ur[k] * h_prev[k];
        gates[r] = (r >= 2 * H && r < 3 * H) ? std::tanh(z) : sigmoid(z);
    }
    const double* ig = gates;
    const double* fg = gates + H;
    const double* gg = gates + 2 * H;
    const double* og = gates + 3 * H;
    for (std::size_t j = 0; j < H; ++j) {
        c[j] = fg[j] * c_prev[j] + ig[j] * gg[j];
        h[j] = og[j] * std::tanh(c[j]);
    }
}

bool all_finite(const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (!std::isfinite(v[i])) return false;
    return true;
}

void check_inputs(ConstMatrixView inputs, const ModelParams& params) {
    if (inputs.cols() != params.shape().input_dim)
        fail(ErrorKind::ShapeMismatch, "input has " + std::to_string(inputs.cols()) + " columns, model expects " +
                                           std::to_string(params.shape().input_dim));
    if (inputs.rows() == 0) fail(ErrorKind::ShapeMismatch, "empty input sequence");
}

}  // namespace

double gate_init_bound(const ModelShape& shape) {
    return 1.0 / std::sqrt(static_cast<double>(shape.input_dim + shape.hidden));
}

double dense_init_bound(const ModelShape& shape) { return 1.0 / std::sqrt(static_cast<double>(shape.hidden)); }

ModelParams init_params(std::uint64_t seed, ModelShape shape) {
    if (shape.input_dim == 0 || shape.hidden == 0) fail(ErrorKind::InvalidArgument, "model dimensions must be >= 1");
    ModelParams p(shape);
    std::mt19937_64 rng(seed);
    const double gate_bound = gate_init_bound(shape);
    auto values = p.values();
    for (std::size_t i = 0; i < p.b_offset(); ++i) values[i] = gate_bound * (2.0 * unit_uniform(rng) - 1.0);
    for (std::size_t j = 0; j < shape.hidden; ++j) p.bias(Gate::Forget, j) = 1.0;
    const double dense_bound = dense_init_bound(shape);
    for (std::size_t j = 0; j < shape.hidden; ++j)
        p.dense_weight(j) = dense_bound * (2.0 * unit_uniform(rng) - 1.0);
    p.dense_bias() = 0.0;
    return p;
}

StepResult lstm_step(std::span<const double> x, const CellState& prev, const ModelParams& params) {
    const std::size_t H = params.shape().hidden;
    if (x.size() != params.shape().input_dim || prev.c.size() != H || prev.h.size() != H)
        fail(ErrorKind::ShapeMismatch, "lstm_step: input or state does not match the model shape");
    std::vector<double> gates(4 * H);
    StepResult out{CellState::zeros(H), {}};
    step_kernel(params, x.data(), prev.h.data(), prev.c.data(), gates.data(), out.state.c.data(),
                out.state.h.data());
    if (!all_finite(out.state.c.data(), H) || !all_finite(out.state.h.data(), H))
        fail(ErrorKind::NonFiniteState, "non-finite cell or hidden state");
    out.gates.input.assign(gates.begin(), gates.begin() + H);
    out.gates.forget.assign(gates.begin() + H, gates.begin() + 2 * H);
    out.gates.cell.assign(gates.begin() + 2 * H, gates.begin() + 3 * H);
    out.gates.output.assign(gates.begin() + 3 * H, gates.end());
    return out;
}

ForwardTrace::ForwardTrace(std::size_t seq_len, ModelShape shape)
    : seq_len_(seq_len),
      shape_(shape),
      inputs_(seq_len, shape.input_dim),
      gates_(seq_len, 4 * shape.hidden),
      cells_(seq_len, shape.hidden),
      hiddens_(seq_len, shape.hidden) {}

ForwardTrace forward(ConstMatrixView inputs, const ModelParams& params) {
    check_inputs(inputs, params);
    const std::size_t T = inputs.rows();
    const std::size_t H = params.shape().hidden;
    ForwardTrace trace(T, params.shape());
    trace.inputs_ = Matrix::from(inputs);
    const std::vector<double> zeros(H, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const double* h_prev = t == 0 ? zeros.data() : trace.hiddens_.row(t - 1).data();
        const double* c_prev = t == 0 ? zeros.data() : trace.cells_.row(t - 1).data();
        step_kernel(params, inputs.row(t).data(), h_prev, c_prev, trace.gates_.row(t).data(),
                    trace.cells_.row(t).data(), trace.hiddens_.row(t).data());
        if (!all_finite(trace.cells_.row(t).data(), H) || !all_finite(trace.hiddens_.row(t).data(), H))
            fail(ErrorKind::NonFiniteState, "non-finite state at timestep " + std::to_string(t + 1));
    }
    double y = params.dense_bias();
    const auto h_last = trace.hiddens_.row(T - 1);
    for (std::size_t j = 0; j < H; ++j) y += params.dense_weight(j) * h_last[j];
    trace.prediction_ = y;
    return trace;
}

double predict(ConstMatrixView inputs, const ModelParams& params) {
    check_inputs(inputs, params);
    const std::size_t H = params.shape().hidden;
    std::vector<double> gates(4 * H), c(H, 0.0), h(H, 0.0), c_next(H), h_next(H);
    for (std::size_t t = 0; t < inputs.rows(); ++t) {
        step_kernel(params, inputs.row(t).data(), h.data(), c.data(), gates.data(), c_next.data(), h_next.data());
        if (!all_finite(c_next.data(), H) || !all_finite(h_next.data(), H))
            fail(ErrorKind::NonFiniteState, "non-finite state at timestep " + std::to_string(t + 1));
        c.swap(c_next);
        h.swap(h_next);
    }
    double y = params.dense_bias();
    for (std::size_t j = 0; j < H; ++j) y += params.dense_weight(j) * h[j];
    return y;
}

}  // namespace hydrolstm
