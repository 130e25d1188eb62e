#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "hydrolstm/data_io.hpp"
#include "hydrolstm/lstm.hpp"
#include "hydrolstm/matrix.hpp"

namespace hydrolstm {

/// Scalar neuron whose sensitivity is requested: the dense output y, or memory cell j at the last step.
class Target {
public:
    enum class Kind { Output, Cell };

    static Target output() { return Target(Kind::Output, 0); }
    static Target cell(std::size_t j) { return Target(Kind::Cell, j); }

    Kind kind() const noexcept { return kind_; }
    std::size_t cell_index() const noexcept { return cell_; }
    std::string describe() const { return kind_ == Kind::Output ? "output" : "cell" + std::to_string(cell_); }

    friend bool operator==(const Target&, const Target&) = default;

private:
    Target(Kind k, std::size_t j) : kind_(k), cell_(j) {}
    Kind kind_;
    std::size_t cell_;
};

/// dF/dx for every input entry; same shape as the input window.
using InputGradient = Matrix;

/// F(x) for the target: y, or c_T[j].
double evaluate_target(const ModelParams& params, ConstMatrixView inputs, Target target);
double evaluate_target(const ForwardTrace& trace, const ModelParams& params, Target target);

/// Exact reverse-mode gradient of the target with respect to the inputs.
/// Throws InvalidArgument for a cell index out of range, NonFiniteGradient on overflow.
InputGradient grad_wrt_inputs(const ModelParams& params, ConstMatrixView inputs, Target target);

/// Same, reusing an existing forward trace.
InputGradient grad_wrt_inputs(const ForwardTrace& trace, const ModelParams& params, Target target);

struct BatchGradient {
    ParamGradient gradient;  // d(mean squared error)/d(theta)
    double loss = 0.0;       // mean squared error of the batch
};

/// Gradient of (y - target)^2 for one input window.
BatchGradient sample_param_gradient(const ModelParams& params, ConstMatrixView inputs, double target);

/// Gradient of the batch-mean squared error; per-sample gradients are reduced in ascending index order.
/// Every sample must carry a target.
BatchGradient grad_wrt_params(const ModelParams& params, std::span<const Sample> batch);

}  // namespace hydrolstm
