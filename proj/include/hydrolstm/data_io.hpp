#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hydrolstm/date.hpp"
#include "hydrolstm/matrix.hpp"
#include "hydrolstm/numfmt.hpp"

namespace hydrolstm {

inline constexpr std::size_t kNumForcings = 5;
inline constexpr std::array<std::string_view, kNumForcings> kForcingNames = {"precip", "srad", "tmin", "tmax",
                                                                             "vp"};

/// Column index of each forcing in every input matrix.
enum class Forcing : std::size_t { Precip = 0, Srad = 1, Tmin = 2, Tmax = 3, Vp = 4 };

constexpr std::size_t index_of(Forcing f) { return static_cast<std::size_t>(f); }

struct ForcingRecord {
    Date date;
    double precip = 0.0;  // mm/day
    double srad = 0.0;    // W/m2
    double tmin = 0.0;    // degC
    double tmax = 0.0;    // degC
    double vp = 0.0;      // Pa

    std::array<double, kNumForcings> values() const { return {precip, srad, tmin, tmax, vp}; }
    friend bool operator==(const ForcingRecord&, const ForcingRecord&) = default;
};

struct DischargeRecord {
    Date date;
    double discharge = 0.0;  // mm/day
    friend bool operator==(const DischargeRecord&, const DischargeRecord&) = default;
};

using ForcingSeries = std::vector<ForcingRecord>;
using DischargeSeries = std::vector<DischargeRecord>;

/// Dated storages (mm) of an external reference model, one column per named state.
struct ProxyStateSeries {
    std::vector<std::string> names;
    std::vector<Date> dates;
    Matrix values;  // dates.size() x names.size()

    /// Row of `d`, or nullopt when the series does not cover it.
    std::optional<std::size_t> index_of(Date d) const;
};

// -- CSV ingestion ----------------------------------------------------------
//
// Forcings:  date,precip,srad,tmin,tmax,vp
// Discharge: date,discharge
// States:    date,<name_1>,...,<name_K>
//
// Dates are ISO-8601 and must be strictly increasing by exactly one day.
// Missing or non-finite values are hard errors naming the offending line.

ForcingSeries parse_forcings(const std::filesystem::path& path);
ForcingSeries parse_forcings(std::istream& in, std::string_view source = "<stream>");
DischargeSeries parse_discharge(const std::filesystem::path& path);
DischargeSeries parse_discharge(std::istream& in, std::string_view source = "<stream>");
ProxyStateSeries parse_proxy_states(const std::filesystem::path& path);
ProxyStateSeries parse_proxy_states(std::istream& in, std::string_view source = "<stream>");

void write_forcings(std::ostream& out, const ForcingSeries& series);
void write_discharge(std::ostream& out, const DischargeSeries& series);
void write_proxy_states(std::ostream& out, const ProxyStateSeries& series);

/// Throws MisalignedDates unless both series cover exactly the same days.
void check_aligned(const ForcingSeries& forcings, const DischargeSeries& discharge);

// -- Periods and splits -----------------------------------------------------

/// Half-open range of day indices [begin, end) into a series.
struct DayRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - begin; }
    bool empty() const noexcept { return end <= begin; }
    bool contains(std::size_t i) const noexcept { return i >= begin && i < end; }
    friend bool operator==(const DayRange&, const DayRange&) = default;
};

struct SplitSpec {
    int train_years = 15;
    double val_fraction = 0.25;  // of the days remaining after training
};

struct SplitRanges {
    DayRange train;
    DayRange validation;
    DayRange test;
};

/// Chronological train/validation/test split of `n_days` days starting at `first`.
/// Training covers whole calendar years; validation is an exact-day fraction of the rest.
SplitRanges split_periods(Date first, std::size_t n_days, const SplitSpec& spec = {});

// -- Normalization ----------------------------------------------------------

struct VariableStats {
    double mean = 0.0;
    double std = 1.0;

    double normalize(double x) const { return (x - mean) / std; }
    double denormalize(double z) const { return z * std + mean; }
    friend bool operator==(const VariableStats&, const VariableStats&) = default;
};

/// Mean/std of the five forcings plus discharge, from the training period only.
class NormStats {
public:
    static constexpr std::size_t kDischarge = kNumForcings;
    static constexpr std::size_t kNumVariables = kNumForcings + 1;

    /// Throws ZeroVariance if any std is not strictly positive and finite.
    explicit NormStats(const std::array<VariableStats, kNumVariables>& stats);

    const VariableStats& forcing(std::size_t i) const { return stats_.at(i); }
    const VariableStats& forcing(Forcing f) const { return stats_[index_of(f)]; }
    const VariableStats& discharge() const { return stats_[kDischarge]; }
    const std::array<VariableStats, kNumVariables>& all() const { return stats_; }

    friend bool operator==(const NormStats&, const NormStats&) = default;

private:
    std::array<VariableStats, kNumVariables> stats_;
};

/// Population (divisor N) statistics over `train`.
NormStats compute_norm_stats(const ForcingSeries& forcings, const DischargeSeries& discharge, DayRange train);

/// N x 5 matrix of normalized forcings.
Matrix normalize(const ForcingSeries& forcings, const NormStats& stats);
/// Inverse of `normalize` back to physical forcing units.
ForcingSeries denormalize(const ForcingSeries& dates_from, ConstMatrixView normalized, const NormStats& stats);

std::vector<double> normalize_discharge(std::span<const double> values, const NormStats& stats);
std::vector<double> denormalize_discharge(std::span<const double> values, const NormStats& stats);

// -- Samples ----------------------------------------------------------------

/// One input window of `seq_len` normalized forcing rows ending on `prediction_date`.
///
/// The window is a view into a shared normalized series, so samples are cheap to copy.
struct Sample {
    std::shared_ptr<const Matrix> series;
    std::size_t start = 0;  // first row of the window in `series`
    std::size_t seq_len = 0;
    std::optional<double> target;  // normalized discharge on prediction_date
    Date prediction_date;

    ConstMatrixView inputs() const {
        return {series->values().data() + start * series->cols(), seq_len, series->cols()};
    }
    /// Calendar day of window row `t` (0-based).
    Date date_of_row(std::size_t t) const {
        return prediction_date - std::chrono::days{static_cast<long>(seq_len - 1 - t)};
    }
};

/// All windows lying entirely inside `range` (N - seq_len + 1 samples for a range of N days).
/// Throws SeriesTooShort when the range holds fewer than `seq_len` days.
std::vector<Sample> make_samples(const ForcingSeries& forcings, const DischargeSeries& discharge,
                                 const NormStats& stats, std::size_t seq_len, std::optional<DayRange> range = {});

/// Same windows without targets, for analyses that need only the inputs.
std::vector<Sample> make_input_samples(const ForcingSeries& forcings, const NormStats& stats, std::size_t seq_len,
                                       std::optional<DayRange> range = {});

}  // namespace hydrolstm
