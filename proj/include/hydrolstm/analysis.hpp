#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hydrolstm/attribution.hpp"
#include "hydrolstm/data_io.hpp"
#include "hydrolstm/lstm.hpp"

namespace hydrolstm {

inline constexpr double kDefaultTsoiThreshold = 2e-3;
inline constexpr double kCorrelationDisplayThreshold = 0.5;

// -- Time steps of influence -------------------------------------------------

/// Trailing days that materially influence a prediction.
///
/// With s_t the per-step attribution sum and d_t = |s_t - s_{t-1}| for t = 2..T (1-based),
/// n is the first t with d_t > threshold and the result is T - n + 1; 0 when nothing crosses.
std::size_t tsoi(std::span<const double> step_sums, double threshold = kDefaultTsoiThreshold);
std::size_t tsoi(const AttributionMatrix& attr, double threshold = kDefaultTsoiThreshold);

struct TsoiResult {
    Date prediction_date;
    int day_of_year = 0;
    std::size_t tsoi = 0;
};

/// Output-target integrated gradients (zero baseline, `steps` Riemann steps) then TSOI, per sample.
std::vector<TsoiResult> tsoi_series(const ModelParams& params, std::span<const Sample> samples,
                                    double threshold = kDefaultTsoiThreshold,
                                    std::size_t steps = kDefaultIgSteps);

struct DoyQuantiles {
    int day_of_year = 0;
    std::size_t count = 0;
    double q25 = 0.0;
    double q50 = 0.0;
    double q75 = 0.0;
};

/// One entry per day of year present in the input, ascending.
using DoyQuantileCurve = std::vector<DoyQuantiles>;

/// Linear-interpolation quantile (p in [0, 1]) of unsorted values.
double quantile(std::vector<double> values, double p);

DoyQuantileCurve doy_quantiles(std::span<const TsoiResult> results);

void write_tsoi_csv(std::ostream& out, std::span<const TsoiResult> results);
void write_quantile_csv(std::ostream& out, const DoyQuantileCurve& curve);

// -- Memory cells vs storages -------------------------------------------------

/// seq_len x hidden trajectories of c_t for one sample.
Matrix cell_states(const ModelParams& params, const Sample& sample);

/// Pearson r; throws ConstantSeries when either side has no variance.
double pearson(std::span<const double> a, std::span<const double> b);

struct CorrelationReport {
    std::vector<std::string> state_names;
    Matrix mean;                     // hidden x K, averaged over valid windows
    std::vector<std::size_t> valid;  // hidden x K counts of windows used (row-major)
    std::size_t skipped = 0;         // (sample, cell, state) windows dropped as constant
    std::size_t samples = 0;

    bool shown(std::size_t cell, std::size_t state) const;
    std::size_t valid_count(std::size_t cell, std::size_t state) const {
        return valid[cell * state_names.size() + state];
    }
};

/// Mean over samples of the per-window Pearson correlation between every cell trajectory
/// and every proxy state over the same 365 (seq_len) days. Throws MisalignedDates when the
/// proxy series does not cover a sample window.
CorrelationReport cell_state_correlations(const ModelParams& params, std::span<const Sample> samples,
                                          const ProxyStateSeries& proxy);

/// Rows `cell`, columns the state names. The masked variant leaves |rho| <= 0.5 entries empty.
void write_correlation_csv(std::ostream& out, const CorrelationReport& report, bool masked);

// -- Single-cell inspection ---------------------------------------------------

struct CellInspection {
    std::size_t cell = 0;
    AttributionMatrix attribution;   // target: c_T[cell]
    std::vector<double> trajectory;  // c_t[cell], t = 1..T
    Matrix temperatures;             // T x 2 physical (tmin, tmax)
    std::vector<Date> dates;         // shared axis for all three panels
};

CellInspection inspect_cell(const ModelParams& params, const Sample& sample, std::size_t cell,
                            const NormStats& stats, std::size_t steps = kDefaultIgSteps);

/// IG / (x - x'): the path-averaged gradient of each entry, i.e. the direction in which the
/// input pushed the target regardless of whether it sat above or below the baseline.
/// Entries with |x - x'| below `min_delta` are reported as 0.
Matrix influence_direction(const AttributionMatrix& attr, ConstMatrixView x, ConstMatrixView baseline,
                           double min_delta = 1e-9);

void write_trajectory_csv(std::ostream& out, const CellInspection& inspection);
void write_temperature_csv(std::ostream& out, const CellInspection& inspection);

}  // namespace hydrolstm
