#include "hydrolstm/attribution.hpp"

#include <cmath>
#include <ostream>

#include "hydrolstm/data_io.hpp"
#include "hydrolstm/error.hpp"
#include "hydrolstm/numfmt.hpp"

namespace hydrolstm {

Matrix integrated_gradients(const GradientField& gradient, ConstMatrixView x, ConstMatrixView baseline,
                            std::size_t steps) {
    if (steps < 1) fail(ErrorKind::InvalidArgument, "integrated gradients needs at least one step");
    if (x.rows() != baseline.rows() || x.cols() != baseline.cols())
        fail(ErrorKind::ShapeMismatch, "input and baseline shapes differ");
    const std::size_t n = x.size();
    const auto xv = x.values();
    const auto bv = baseline.values();
    Matrix point(x.rows(), x.cols());
    Matrix sum(x.rows(), x.cols());
    auto pv = point.values();
    auto sv = sum.values();
    const double m = static_cast<double>(steps);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double alpha = static_cast<double>(k) / m;
        for (std::size_t i = 0; i < n; ++i) pv[i] = bv[i] + alpha * (xv[i] - bv[i]);
        const Matrix g = gradient(point.view());
        if (g.rows() != x.rows() || g.cols() != x.cols())
            fail(ErrorKind::ShapeMismatch, "gradient field returned the wrong shape");
        const auto gv = g.values();
        for (std::size_t i = 0; i < n; ++i) sv[i] += gv[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        sv[i] = (xv[i] - bv[i]) / m * sv[i];
        if (!std::isfinite(sv[i])) fail(ErrorKind::NonFiniteGradient, "non-finite attribution");
    }
    return sum;
}

AttributionMatrix integrated_gradients(const ModelParams& params, ConstMatrixView x, const Baseline& baseline,
                                       Target target, std::size_t steps) {
    const GradientField field = [&](ConstMatrixView point) { return grad_wrt_inputs(params, point, target); };
    AttributionMatrix out;
    out.values = integrated_gradients(field, x, baseline.values.view(), steps);
    out.target = target;
    out.baseline = baseline.description;
    out.steps = steps;
    out.target_at_input = evaluate_target(params, x, target);
    out.target_at_baseline = evaluate_target(params, baseline.values.view(), target);
    double total = 0.0;
    for (double v : out.values.values()) total += v;
    out.residual = std::abs(total - (out.target_at_input - out.target_at_baseline));
    return out;
}

double completeness_residual(const AttributionMatrix& attr, const ModelParams& params, ConstMatrixView x,
                             ConstMatrixView baseline, Target target) {
    double total = 0.0;
    for (double v : attr.values.values()) total += v;
    const double delta = evaluate_target(params, x, target) - evaluate_target(params, baseline, target);
    return std::abs(total - delta);
}

std::vector<double> timestep_sums(const AttributionMatrix& attr) {
    std::vector<double> s(attr.values.rows(), 0.0);
    for (std::size_t t = 0; t < attr.values.rows(); ++t)
        for (double v : attr.values.row(t)) s[t] += v;
    return s;
}

void write_attribution_csv(std::ostream& out, const AttributionMatrix& attr, Date first_day) {
    out << "t,date";
    for (std::size_t i = 0; i < attr.values.cols(); ++i)
        out << ',' << (i < kNumForcings ? std::string(kForcingNames[i]) : "x" + std::to_string(i));
    out << '\n';
    for (std::size_t t = 0; t < attr.values.rows(); ++t) {
        out << t + 1 << ',' << format_date(first_day + std::chrono::days{static_cast<long>(t)});
        for (double v : attr.values.row(t)) out << ',' << format_number(v);
        out << '\n';
    }
}

}  // namespace hydrolstm
