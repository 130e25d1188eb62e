#include "hydrolstm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>

#include "hydrolstm/error.hpp"
#include "hydrolstm/numfmt.hpp"
#include "hydrolstm/parallel.hpp"

namespace hydrolstm {

std::size_t tsoi(std::span<const double> step_sums, double threshold) {
    const std::size_t T = step_sums.size();
    for (std::size_t t = 1; t < T; ++t) {
        // 0-based index t is 1-based step t + 1.
        if (std::abs(step_sums[t] - step_sums[t - 1]) > threshold) return T - (t + 1) + 1;
    }
    return 0;
}

std::size_t tsoi(const AttributionMatrix& attr, double threshold) { return tsoi(timestep_sums(attr), threshold); }

std::vector<TsoiResult> tsoi_series(const ModelParams& params, std::span<const Sample> samples, double threshold,
                                    std::size_t steps) {
    std::vector<TsoiResult> out(samples.size());
    parallel_for(samples.size(), [&](std::size_t k) {
        const auto& s = samples[k];
        const auto x = s.inputs();
        const auto attr =
            integrated_gradients(params, x, Baseline::zeros(x.rows(), x.cols()), Target::output(), steps);
        out[k] = {s.prediction_date, day_of_year(s.prediction_date), tsoi(attr, threshold)};
    });
    return out;
}

double quantile(std::vector<double> values, double p) {
    if (values.empty()) fail(ErrorKind::InvalidArgument, "quantile of an empty set");
    std::sort(values.begin(), values.end());
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

DoyQuantileCurve doy_quantiles(std::span<const TsoiResult> results) {
    if (results.empty()) fail(ErrorKind::InvalidArgument, "no TSOI results to aggregate");
    std::map<int, std::vector<double>> groups;
    for (const auto& r : results) groups[r.day_of_year].push_back(static_cast<double>(r.tsoi));
    DoyQuantileCurve curve;
    curve.reserve(groups.size());
    for (const auto& [doy, values] : groups)
        curve.push_back({doy, values.size(), quantile(values, 0.25), quantile(values, 0.50), quantile(values, 0.75)});
    return curve;
}

void write_tsoi_csv(std::ostream& out, std::span<const TsoiResult> results) {
    out << "date,doy,tsoi\n";
    for (const auto& r : results) out << format_date(r.prediction_date) << ',' << r.day_of_year << ',' << r.tsoi << '\n';
}

void write_quantile_csv(std::ostream& out, const DoyQuantileCurve& curve) {
    out << "doy,q25,q50,q75\n";
    for (const auto& q : curve)
        out << q.day_of_year << ',' << format_number(q.q25) << ',' << format_number(q.q50) << ','
            << format_number(q.q75) << '\n';
}

Matrix cell_states(const ModelParams& params, const Sample& sample) {
    return forward(sample.inputs(), params).cells();
}

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) fail(ErrorKind::LengthMismatch, "pearson needs equal lengths >= 2");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    // Relative floor: a series whose spread is at rounding level of its magnitude is constant.
    const auto flat = [n](double ss, double mean) { return ss <= n * 1e-24 * std::max(1.0, mean * mean); };
    if (flat(saa, ma) || flat(sbb, mb)) fail(ErrorKind::ConstantSeries, "constant series in correlation window");
    return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

bool CorrelationReport::shown(std::size_t cell, std::size_t state) const {
    return valid_count(cell, state) > 0 && std::abs(mean(cell, state)) > kCorrelationDisplayThreshold;
}

CorrelationReport cell_state_correlations(const ModelParams& params, std::span<const Sample> samples,
                                          const ProxyStateSeries& proxy) {
    if (samples.empty()) fail(ErrorKind::InvalidArgument, "no samples for correlation analysis");
    const std::size_t H = params.shape().hidden;
    const std::size_t K = proxy.names.size();
    std::vector<std::size_t> first_row(samples.size());
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto first = proxy.index_of(samples[s].date_of_row(0));
        const auto last = proxy.index_of(samples[s].prediction_date);
        if (!first || !last)
            fail(ErrorKind::MisalignedDates, "proxy states do not cover the window ending " +
                                                 format_date(samples[s].prediction_date));
        first_row[s] = *first;
    }

    // Per-sample H x K correlations, NaN marking constant windows; folded serially afterwards.
    std::vector<Matrix> per_sample(samples.size());
    parallel_for(samples.size(), [&](std::size_t s) {
        const auto& sample = samples[s];
        const Matrix cells = cell_states(params, sample);
        const std::size_t T = sample.seq_len;
        Matrix rho(H, K);
        std::vector<double> cell(T), state(T);
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t t = 0; t < T; ++t) state[t] = proxy.values(first_row[s] + t, k);
            for (std::size_t j = 0; j < H; ++j) {
                for (std::size_t t = 0; t < T; ++t) cell[t] = cells(t, j);
                try {
                    rho(j, k) = pearson(cell, state);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::ConstantSeries) throw;
                    rho(j, k) = std::numeric_limits<double>::quiet_NaN();
                }
            }
        }
        per_sample[s] = std::move(rho);
    });

    CorrelationReport report;
    report.state_names = proxy.names;
    report.mean = Matrix(H, K);
    report.valid.assign(H * K, 0);
    report.samples = samples.size();
    for (const auto& rho : per_sample) {
        for (std::size_t j = 0; j < H; ++j) {
            for (std::size_t k = 0; k < K; ++k) {
                if (std::isnan(rho(j, k))) {
                    ++report.skipped;
                    continue;
                }
                report.mean(j, k) += rho(j, k);
                ++report.valid[j * K + k];
            }
        }
    }
    for (std::size_t j = 0; j < H; ++j)
        for (std::size_t k = 0; k < K; ++k)
            if (report.valid[j * K + k] > 0)
                report.mean(j, k) = std::clamp(report.mean(j, k) / static_cast<double>(report.valid[j * K + k]),
                                               -1.0, 1.0);
    return report;
}

void write_correlation_csv(std::ostream& out, const CorrelationReport& report, bool masked) {
    out << "cell";
    for (const auto& n : report.state_names) out << ',' << n;
    out << '\n';
    for (std::size_t j = 0; j < report.mean.rows(); ++j) {
        out << j;
        for (std::size_t k = 0; k < report.state_names.size(); ++k) {
            out << ',';
            if (report.valid_count(j, k) == 0) continue;
            if (!masked || report.shown(j, k)) out << format_number(report.mean(j, k));
        }
        out << '\n';
    }
}

CellInspection inspect_cell(const ModelParams& params, const Sample& sample, std::size_t cell,
                            const NormStats& stats, std::size_t steps) {
    if (cell >= params.shape().hidden)
        fail(ErrorKind::InvalidArgument, "cell " + std::to_string(cell) + " out of range (hidden size " +
                                             std::to_string(params.shape().hidden) + ")");
    const auto x = sample.inputs();
    CellInspection out;
    out.cell = cell;
    out.attribution = integrated_gradients(params, x, Baseline::zeros(x.rows(), x.cols()), Target::cell(cell), steps);
    const auto trace = forward(x, params);
    out.trajectory.resize(sample.seq_len);
    out.temperatures = Matrix(sample.seq_len, 2);
    out.dates.resize(sample.seq_len);
    for (std::size_t t = 0; t < sample.seq_len; ++t) {
        out.trajectory[t] = trace.cells()(t, cell);
        out.temperatures(t, 0) = stats.forcing(Forcing::Tmin).denormalize(x(t, index_of(Forcing::Tmin)));
        out.temperatures(t, 1) = stats.forcing(Forcing::Tmax).denormalize(x(t, index_of(Forcing::Tmax)));
        out.dates[t] = sample.date_of_row(t);
    }
    return out;
}

Matrix influence_direction(const AttributionMatrix& attr, ConstMatrixView x, ConstMatrixView baseline,
                           double min_delta) {
    if (x.rows() != attr.values.rows() || x.cols() != attr.values.cols() || baseline.rows() != x.rows() ||
        baseline.cols() != x.cols())
        fail(ErrorKind::ShapeMismatch, "attribution, input and baseline shapes differ");
    Matrix out(x.rows(), x.cols());
    for (std::size_t t = 0; t < x.rows(); ++t) {
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double delta = x(t, i) - baseline(t, i);
            out(t, i) = std::abs(delta) < min_delta ? 0.0 : attr.values(t, i) / delta;
        }
    }
    return out;
}

void write_trajectory_csv(std::ostream& out, const CellInspection& inspection) {
    out << "t,date,cell" << inspection.cell << '\n';
    for (std::size_t t = 0; t < inspection.trajectory.size(); ++t)
        out << t + 1 << ',' << format_date(inspection.dates[t]) << ',' << format_number(inspection.trajectory[t])
            << '\n';
}

void write_temperature_csv(std::ostream& out, const CellInspection& inspection) {
    out << "t,date,tmin,tmax\n";
    for (std::size_t t = 0; t < inspection.dates.size(); ++t)
        out << t + 1 << ',' << format_date(inspection.dates[t]) << ',' << format_number(inspection.temperatures(t, 0))
            << ',' << format_number(inspection.temperatures(t, 1)) << '\n';
}

}  // namespace hydrolstm
