#include "hydrolstm/data_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hydrolstm/error.hpp"

namespace hydrolstm {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos)));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

std::string where(std::string_view source, std::size_t line_no) {
    return std::string(source) + " line " + std::to_string(line_no);
}

/// Generic dated CSV: header resolution plus per-line numeric fields in the requested column order.
struct DatedTable {
    std::vector<std::string> columns;
    std::vector<Date> dates;
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;
};

DatedTable read_dated_table(std::istream& in, std::string_view source, std::span<const std::string_view> required) {
    DatedTable table;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) fail(ErrorKind::MissingColumn, std::string(source) + ": empty file, no header");
    ++line_no;
    const auto header = split_fields(line);
    if (header.empty() || header[0] != "date")
        fail(ErrorKind::MissingColumn, where(source, 1) + ": first column must be 'date'");

    std::vector<std::size_t> column_of;
    if (required.empty()) {
        // Every non-date column, in file order.
        if (header.size() < 2) fail(ErrorKind::MissingColumn, where(source, 1) + ": no value columns");
        for (std::size_t c = 1; c < header.size(); ++c) {
            if (header[c].empty()) fail(ErrorKind::MissingColumn, where(source, 1) + ": empty column name");
            table.columns.emplace_back(header[c]);
            column_of.push_back(c);
        }
    } else {
        for (const auto name : required) {
            const auto it = std::find(header.begin(), header.end(), name);
            if (it == header.end())
                fail(ErrorKind::MissingColumn, where(source, 1) + ": missing column '" + std::string(name) + "'");
            table.columns.emplace_back(name);
            column_of.push_back(static_cast<std::size_t>(it - header.begin()));
        }
    }

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size())
            fail(ErrorKind::MalformedRecord, where(source, line_no) + ": expected " + std::to_string(header.size()) +
                                                 " fields, got " + std::to_string(fields.size()));
        Date date;
        try {
            date = parse_date(fields[0]);
        } catch (const Error& e) {
            fail(ErrorKind::MalformedRecord, where(source, line_no) + ": " + e.what());
        }
        if (!table.dates.empty() && date != table.dates.back() + std::chrono::days{1})
            fail(ErrorKind::NonContiguousDates, where(source, line_no) + ": date " + format_date(date) +
                                                    " does not follow " + format_date(table.dates.back()));
        std::vector<double> row;
        row.reserve(column_of.size());
        for (std::size_t k = 0; k < column_of.size(); ++k) {
            const auto field = fields[column_of[k]];
            if (field.empty())
                fail(ErrorKind::MalformedRecord,
                     where(source, line_no) + ": missing value for '" + table.columns[k] + "'");
            double value = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc{} || ptr != field.data() + field.size())
                fail(ErrorKind::MalformedRecord, where(source, line_no) + ": cannot parse '" + std::string(field) +
                                                     "' for '" + table.columns[k] + "'");
            if (!std::isfinite(value))
                fail(ErrorKind::NonFiniteValue, where(source, line_no) + ": non-finite '" + table.columns[k] + "'");
            row.push_back(value);
        }
        table.dates.push_back(date);
        table.rows.push_back(std::move(row));
        table.line_numbers.push_back(line_no);
    }
    return table;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
    return in;
}

void require_nonnegative(double value, std::string_view column, std::string_view source, std::size_t line_no) {
    if (value < 0.0)
        fail(ErrorKind::NegativeValue, where(source, line_no) + ": negative '" + std::string(column) + "'");
}

}  // namespace

std::optional<std::size_t> ProxyStateSeries::index_of(Date d) const {
    if (dates.empty() || d < dates.front() || d > dates.back()) return std::nullopt;
    return static_cast<std::size_t>(days_between(dates.front(), d));
}

ForcingSeries parse_forcings(std::istream& in, std::string_view source) {
    const std::array<std::string_view, kNumForcings> columns = kForcingNames;
    const auto table = read_dated_table(in, source, columns);
    ForcingSeries out;
    out.reserve(table.dates.size());
    for (std::size_t r = 0; r < table.dates.size(); ++r) {
        const auto& v = table.rows[r];
        const auto line_no = table.line_numbers[r];
        ForcingRecord rec{table.dates[r], v[0], v[1], v[2], v[3], v[4]};
        require_nonnegative(rec.precip, "precip", source, line_no);
        require_nonnegative(rec.srad, "srad", source, line_no);
        require_nonnegative(rec.vp, "vp", source, line_no);
        if (rec.tmin > rec.tmax)
            fail(ErrorKind::TminAboveTmax, where(source, line_no) + ": tmin " + format_number(rec.tmin) +
                                               " exceeds tmax " + format_number(rec.tmax));
        out.push_back(rec);
    }
    return out;
}

ForcingSeries parse_forcings(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_forcings(in, path.string());
}

DischargeSeries parse_discharge(std::istream& in, std::string_view source) {
    const std::array<std::string_view, 1> columns = {"discharge"};
    const auto table = read_dated_table(in, source, columns);
    DischargeSeries out;
    out.reserve(table.dates.size());
    for (std::size_t r = 0; r < table.dates.size(); ++r) {
        require_nonnegative(table.rows[r][0], "discharge", source, table.line_numbers[r]);
        out.push_back({table.dates[r], table.rows[r][0]});
    }
    return out;
}

DischargeSeries parse_discharge(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_discharge(in, path.string());
}

ProxyStateSeries parse_proxy_states(std::istream& in, std::string_view source) {
    const auto table = read_dated_table(in, source, {});
    ProxyStateSeries out;
    out.names = table.columns;
    out.dates = table.dates;
    out.values = Matrix(table.dates.size(), table.columns.size());
    for (std::size_t r = 0; r < table.dates.size(); ++r) {
        for (std::size_t k = 0; k < table.columns.size(); ++k) {
            require_nonnegative(table.rows[r][k], table.columns[k], source, table.line_numbers[r]);
            out.values(r, k) = table.rows[r][k];
        }
    }
    return out;
}

ProxyStateSeries parse_proxy_states(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_proxy_states(in, path.string());
}

void write_forcings(std::ostream& out, const ForcingSeries& series) {
    out << "date,precip,srad,tmin,tmax,vp\n";
    for (const auto& r : series) {
        out << format_date(r.date) << ',' << format_number(r.precip) << ',' << format_number(r.srad) << ','
            << format_number(r.tmin) << ',' << format_number(r.tmax) << ',' << format_number(r.vp) << '\n';
    }
}

void write_discharge(std::ostream& out, const DischargeSeries& series) {
    out << "date,discharge\n";
    for (const auto& r : series) out << format_date(r.date) << ',' << format_number(r.discharge) << '\n';
}

void write_proxy_states(std::ostream& out, const ProxyStateSeries& series) {
    out << "date";
    for (const auto& n : series.names) out << ',' << n;
    out << '\n';
    for (std::size_t r = 0; r < series.dates.size(); ++r) {
        out << format_date(series.dates[r]);
        for (std::size_t k = 0; k < series.names.size(); ++k) out << ',' << format_number(series.values(r, k));
        out << '\n';
    }
}

void check_aligned(const ForcingSeries& forcings, const DischargeSeries& discharge) {
    if (forcings.size() != discharge.size() || forcings.empty() ||
        forcings.front().date != discharge.front().date)
        fail(ErrorKind::MisalignedDates, "forcing and discharge series must cover the same days (forcings: " +
                                             std::to_string(forcings.size()) + " days, discharge: " +
                                             std::to_string(discharge.size()) + " days)");
}

SplitRanges split_periods(Date first, std::size_t n_days, const SplitSpec& spec) {
    if (spec.train_years < 1) fail(ErrorKind::InvalidArgument, "train_years must be >= 1");
    if (!(spec.val_fraction > 0.0 && spec.val_fraction < 1.0))
        fail(ErrorKind::InvalidArgument, "val_fraction must lie in (0, 1)");
    const auto train_days = static_cast<std::size_t>(days_between(first, add_years(first, spec.train_years)));
    if (n_days <= train_days)
        fail(ErrorKind::SpanTooShort, std::to_string(n_days) + " days do not exceed the " +
                                          std::to_string(spec.train_years) + "-year training period");
    const std::size_t remaining = n_days - train_days;
    const auto val_days = static_cast<std::size_t>(std::floor(static_cast<double>(remaining) * spec.val_fraction));
    if (val_days == 0 || val_days >= remaining)
        fail(ErrorKind::SpanTooShort, "only " + std::to_string(remaining) +
                                          " days remain after training; validation or test period would be empty");
    SplitRanges out;
    out.train = {0, train_days};
    out.validation = {train_days, train_days + val_days};
    out.test = {train_days + val_days, n_days};
    return out;
}

NormStats::NormStats(const std::array<VariableStats, kNumVariables>& stats) : stats_(stats) {
    for (std::size_t i = 0; i < kNumVariables; ++i) {
        if (!(stats_[i].std > 0.0) || !std::isfinite(stats_[i].std) || !std::isfinite(stats_[i].mean)) {
            const std::string name = i < kNumForcings ? std::string(kForcingNames[i]) : "discharge";
            fail(ErrorKind::ZeroVariance, "variable '" + name + "' has zero variance over the training period");
        }
    }
}

NormStats compute_norm_stats(const ForcingSeries& forcings, const DischargeSeries& discharge, DayRange train) {
    check_aligned(forcings, discharge);
    if (train.empty() || train.end > forcings.size())
        fail(ErrorKind::InvalidArgument, "training range is empty or exceeds the series");
    std::array<VariableStats, NormStats::kNumVariables> stats{};
    const auto n = static_cast<double>(train.size());
    auto value_at = [&](std::size_t day, std::size_t var) {
        return var < kNumForcings ? forcings[day].values()[var] : discharge[day].discharge;
    };
    for (std::size_t var = 0; var < NormStats::kNumVariables; ++var) {
        double sum = 0.0;
        for (std::size_t d = train.begin; d < train.end; ++d) sum += value_at(d, var);
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t d = train.begin; d < train.end; ++d) {
            const double dev = value_at(d, var) - mean;
            ss += dev * dev;
        }
        stats[var] = {mean, std::sqrt(ss / n)};
    }
    return NormStats(stats);
}

Matrix normalize(const ForcingSeries& forcings, const NormStats& stats) {
    Matrix out(forcings.size(), kNumForcings);
    for (std::size_t d = 0; d < forcings.size(); ++d) {
        const auto v = forcings[d].values();
        for (std::size_t i = 0; i < kNumForcings; ++i) out(d, i) = stats.forcing(i).normalize(v[i]);
    }
    return out;
}

ForcingSeries denormalize(const ForcingSeries& dates_from, ConstMatrixView normalized, const NormStats& stats) {
    if (normalized.rows() != dates_from.size() || normalized.cols() != kNumForcings)
        fail(ErrorKind::ShapeMismatch, "normalized matrix does not match the dated series");
    ForcingSeries out;
    out.reserve(dates_from.size());
    for (std::size_t d = 0; d < dates_from.size(); ++d) {
        std::array<double, kNumForcings> v{};
        for (std::size_t i = 0; i < kNumForcings; ++i) v[i] = stats.forcing(i).denormalize(normalized(d, i));
        out.push_back({dates_from[d].date, v[0], v[1], v[2], v[3], v[4]});
    }
    return out;
}

std::vector<double> normalize_discharge(std::span<const double> values, const NormStats& stats) {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(),
                   [&](double q) { return stats.discharge().normalize(q); });
    return out;
}

std::vector<double> denormalize_discharge(std::span<const double> values, const NormStats& stats) {
    std::vector<double> out(values.size());
    std::transform(values.begin(), values.end(), out.begin(),
                   [&](double z) { return stats.discharge().denormalize(z); });
    return out;
}

namespace {

std::vector<Sample> windows(const ForcingSeries& forcings, const DischargeSeries* discharge, const NormStats& stats,
                            std::size_t seq_len, std::optional<DayRange> range) {
    if (seq_len == 0) fail(ErrorKind::InvalidArgument, "seq_len must be >= 1");
    const DayRange r = range.value_or(DayRange{0, forcings.size()});
    if (r.end > forcings.size()) fail(ErrorKind::InvalidArgument, "range exceeds the series");
    if (r.size() < seq_len || r.empty())
        fail(ErrorKind::SeriesTooShort, "range of " + std::to_string(r.size()) + " days is shorter than seq_len " +
                                            std::to_string(seq_len));
    auto series = std::make_shared<const Matrix>(normalize(forcings, stats));
    std::vector<Sample> out;
    out.reserve(r.size() - seq_len + 1);
    for (std::size_t start = r.begin; start + seq_len <= r.end; ++start) {
        const std::size_t last = start + seq_len - 1;
        Sample s;
        s.series = series;
        s.start = start;
        s.seq_len = seq_len;
        s.prediction_date = forcings[last].date;
        if (discharge) s.target = stats.discharge().normalize((*discharge)[last].discharge);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<Sample> make_samples(const ForcingSeries& forcings, const DischargeSeries& discharge,
                                 const NormStats& stats, std::size_t seq_len, std::optional<DayRange> range) {
    check_aligned(forcings, discharge);
    return windows(forcings, &discharge, stats, seq_len, range);
}

std::vector<Sample> make_input_samples(const ForcingSeries& forcings, const NormStats& stats, std::size_t seq_len,
                                       std::optional<DayRange> range) {
    return windows(forcings, nullptr, stats, seq_len, range);
}

}  // namespace hydrolstm
