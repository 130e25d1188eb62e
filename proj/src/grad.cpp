#include "hydrolstm/grad.hpp"

#include <cmath>
#include <vector>

#include "hydrolstm/error.hpp"
#include "hydrolstm/parallel.hpp"

namespace hydrolstm {

namespace {

void check_target(const ModelParams& params, Target target) {
    if (target.kind() == Target::Kind::Cell && target.cell_index() >= params.shape().hidden)
        fail(ErrorKind::InvalidArgument, "cell index " + std::to_string(target.cell_index()) +
                                             " out of range for hidden size " +
                                             std::to_string(params.shape().hidden));
}

/// Unrolled reverse accumulation from seeds on (h_T, c_T).
/// Writes dF/dx into `dx` and accumulates dF/dtheta (LSTM part only) into `dparams` when non-null.
void backward(const ForwardTrace& trace, const ModelParams& params, std::vector<double> dh, std::vector<double> dc,
              Matrix* dx, ParamGradient* dparams) {
    const std::size_t T = trace.seq_len();
    const std::size_t H = params.shape().hidden;
    const std::size_t D = params.shape().input_dim;
    const double* W = params.input_weights();
    const double* U = params.recurrent_weights();
    std::vector<double> dz(4 * H), dh_prev(H), dc_prev(H);

    for (std::size_t step = T; step-- > 0;) {
        const auto gates = trace.gates().row(step);
        const auto cell = trace.cells().row(step);
        for (std::size_t j = 0; j < H; ++j) {
            const double i = gates[j];
            const double f = gates[H + j];
            const double g = gates[2 * H + j];
            const double o = gates[3 * H + j];
            const double tc = std::tanh(cell[j]);
            const double d_o = dh[j] * tc;
            const double dcj = dc[j] + dh[j] * o * (1.0 - tc * tc);
            dz[j] = dcj * g * i * (1.0 - i);
            dz[H + j] = dcj * trace.prev_cell(step, j) * f * (1.0 - f);
            dz[2 * H + j] = dcj * i * (1.0 - g * g);
            dz[3 * H + j] = d_o * o * (1.0 - o);
            dc_prev[j] = dcj * f;
        }
        if (dx) {
            auto row = dx->row(step);
            for (std::size_t k = 0; k < D; ++k) {
                double acc = 0.0;
                for (std::size_t r = 0; r < 4 * H; ++r) acc += W[r * D + k] * dz[r];
                row[k] = acc;
            }
        }
        for (std::size_t k = 0; k < H; ++k) {
            double acc = 0.0;
            for (std::size_t r = 0; r < 4 * H; ++r) acc += U[r * H + k] * dz[r];
            dh_prev[k] = acc;
        }
        if (dparams) {
            const auto x = trace.inputs().row(step);
            double* dW = dparams->input_weights();
            double* dU = dparams->recurrent_weights();
            double* db = dparams->biases();
            for (std::size_t r = 0; r < 4 * H; ++r) {
                const double d = dz[r];
                for (std::size_t k = 0; k < D; ++k) dW[r * D + k] += d * x[k];
                if (step > 0) {
                    const auto h_prev = trace.hiddens().row(step - 1);
                    for (std::size_t k = 0; k < H; ++k) dU[r * H + k] += d * h_prev[k];
                }
                db[r] += d;
            }
        }
        dh.swap(dh_prev);
        dc.swap(dc_prev);
    }
}

template <class Values>
void require_finite(const Values& values, const char* what) {
    for (double v : values)
        if (!std::isfinite(v)) fail(ErrorKind::NonFiniteGradient, std::string("non-finite ") + what);
}

}  // namespace

double evaluate_target(const ForwardTrace& trace, const ModelParams& params, Target target) {
    check_target(params, target);
    if (target.kind() == Target::Kind::Output) return trace.prediction();
    return trace.cells()(trace.seq_len() - 1, target.cell_index());
}

double evaluate_target(const ModelParams& params, ConstMatrixView inputs, Target target) {
    check_target(params, target);
    if (target.kind() == Target::Kind::Output) return predict(inputs, params);
    return evaluate_target(forward(inputs, params), params, target);
}

InputGradient grad_wrt_inputs(const ForwardTrace& trace, const ModelParams& params, Target target) {
    check_target(params, target);
    const std::size_t H = params.shape().hidden;
    std::vector<double> dh(H, 0.0), dc(H, 0.0);
    if (target.kind() == Target::Kind::Output) {
        for (std::size_t j = 0; j < H; ++j) dh[j] = params.dense_weight(j);
    } else {
        dc[target.cell_index()] = 1.0;
    }
    Matrix dx(trace.seq_len(), params.shape().input_dim);
    backward(trace, params, std::move(dh), std::move(dc), &dx, nullptr);
    require_finite(dx.values(), "input gradient");
    return dx;
}

InputGradient grad_wrt_inputs(const ModelParams& params, ConstMatrixView inputs, Target target) {
    check_target(params, target);
    return grad_wrt_inputs(forward(inputs, params), params, target);
}

BatchGradient sample_param_gradient(const ModelParams& params, ConstMatrixView inputs, double target) {
    const auto trace = forward(inputs, params);
    const std::size_t H = params.shape().hidden;
    const double err = trace.prediction() - target;
    const double dy = 2.0 * err;
    BatchGradient out{ParamGradient(params.shape()), err * err};
    const auto h_last = trace.hiddens().row(trace.seq_len() - 1);
    std::vector<double> dh(H), dc(H, 0.0);
    for (std::size_t j = 0; j < H; ++j) {
        dh[j] = dy * params.dense_weight(j);
        out.gradient.dense_weight(j) = dy * h_last[j];
    }
    out.gradient.dense_bias() = dy;
    backward(trace, params, std::move(dh), std::move(dc), nullptr, &out.gradient);
    return out;
}

BatchGradient grad_wrt_params(const ModelParams& params, std::span<const Sample> batch) {
    if (batch.empty()) fail(ErrorKind::InvalidArgument, "empty batch");
    for (const auto& s : batch)
        if (!s.target) fail(ErrorKind::InvalidArgument, "sample without target in training batch");
    std::vector<BatchGradient> per_sample(batch.size());
    parallel_for(batch.size(), [&](std::size_t k) {
        per_sample[k] = sample_param_gradient(params, batch[k].inputs(), *batch[k].target);
    });
    BatchGradient out{ParamGradient(params.shape()), 0.0};
    auto acc = out.gradient.values();
    for (const auto& g : per_sample) {
        const auto v = g.gradient.values();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
        out.loss += g.loss;
    }
    const double inv = 1.0 / static_cast<double>(batch.size());
    for (auto& v : acc) v *= inv;
    out.loss *= inv;
    require_finite(acc, "parameter gradient");
    return out;
}

}  // namespace hydrolstm
