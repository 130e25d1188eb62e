#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>

#include "hydrolstm/date.hpp"
#include "hydrolstm/grad.hpp"
#include "hydrolstm/lstm.hpp"
#include "hydrolstm/matrix.hpp"

namespace hydrolstm {

inline constexpr std::size_t kDefaultIgSteps = 1000;

/// Reference input x' of integrated gradients.
///
/// The default is all zeros in normalized space, i.e. every forcing at its training-period
/// mean ("climatological" inputs), not zero precipitation or 0 degC.
struct Baseline {
    Matrix values;
    std::string description;

    static Baseline zeros(std::size_t rows, std::size_t cols) { return {Matrix(rows, cols), "zeros"}; }
};

struct AttributionMatrix {
    Matrix values;  // same shape as the input window
    Target target = Target::output();
    std::string baseline;
    std::size_t steps = 0;
    double target_at_input = 0.0;     // F(x)
    double target_at_baseline = 0.0;  // F(x')
    double residual = 0.0;            // |sum(values) - (F(x) - F(x'))|
};

/// Gradient of some scalar function at a point, shaped like the point.
using GradientField = std::function<Matrix(ConstMatrixView)>;

/// Right-endpoint Riemann sum of the path integral:
///   IG = (x - x') / m * sum_{k=1..m} grad F(x' + k/m (x - x')),
/// accumulated in ascending k.
Matrix integrated_gradients(const GradientField& gradient, ConstMatrixView x, ConstMatrixView baseline,
                            std::size_t steps);

/// Integrated gradients of an LSTM target, gradients from BPTT. Stores the completeness residual.
AttributionMatrix integrated_gradients(const ModelParams& params, ConstMatrixView x, const Baseline& baseline,
                                       Target target, std::size_t steps = kDefaultIgSteps);

/// |sum(attributions) - (F(x) - F(x'))|, re-evaluating F with two forward passes.
double completeness_residual(const AttributionMatrix& attr, const ModelParams& params, ConstMatrixView x,
                             ConstMatrixView baseline, Target target);

/// Per-timestep sum of attributions across features.
std::vector<double> timestep_sums(const AttributionMatrix& attr);

/// CSV `t,date,precip,srad,tmin,tmax,vp`, one row per timestep (t is 1-based), first row dated `first_day`.
void write_attribution_csv(std::ostream& out, const AttributionMatrix& attr, Date first_day);

}  // namespace hydrolstm
