#include "hydrolstm/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "hydrolstm/analysis.hpp"
#include "hydrolstm/attribution.hpp"
#include "hydrolstm/checkpoint.hpp"
#include "hydrolstm/cli/manifest.hpp"
#include "hydrolstm/cli/svg.hpp"
#include "hydrolstm/config.hpp"
#include "hydrolstm/data_io.hpp"
#include "hydrolstm/error.hpp"
#include "hydrolstm/metrics.hpp"
#include "hydrolstm/numfmt.hpp"
#include "hydrolstm/synthetic.hpp"
#include "hydrolstm/training.hpp"

namespace hydrolstm::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPeriodNames = "train, validation, test or all";

// -- Checkpoint metadata ----------------------------------------------------

std::string norm_key(std::size_t v, const char* field) {
    const std::string name = v < kNumForcings ? std::string(kForcingNames[v]) : "discharge";
    return "norm." + name + "." + field;
}

void put_metadata(Checkpoint& ck, std::size_t seq_len, const SplitSpec& split, const NormStats& stats) {
    ck.metadata["seq_len"] = std::to_string(seq_len);
    ck.metadata["split.train_years"] = std::to_string(split.train_years);
    ck.metadata["split.val_fraction"] = format_number(split.val_fraction);
    for (std::size_t v = 0; v < NormStats::kNumVariables; ++v) {
        ck.metadata[norm_key(v, "mean")] = format_number(stats.all()[v].mean);
        ck.metadata[norm_key(v, "std")] = format_number(stats.all()[v].std);
    }
}

double meta_number(const Checkpoint& ck, const std::string& key) {
    const auto text = ck.meta(key);
    if (!text) fail(ErrorKind::Checkpoint, "checkpoint lacks metadata '" + key + "'");
    const auto v = parse_number(*text);
    if (!v) fail(ErrorKind::Checkpoint, "checkpoint metadata '" + key + "' is not a number: " + *text);
    return *v;
}

struct Model {
    Checkpoint checkpoint;
    std::size_t seq_len = 0;
    SplitSpec split;
    NormStats stats;
};

Model load_model(const fs::path& path) {
    Checkpoint ck = load_checkpoint(path);
    if (ck.params.shape().input_dim != kNumForcings)
        fail(ErrorKind::ShapeMismatch, "checkpoint expects " + std::to_string(ck.params.shape().input_dim) +
                                           " inputs but the data has " + std::to_string(kNumForcings));
    const double seq_len = meta_number(ck, "seq_len");
    if (!(seq_len >= 1.0)) fail(ErrorKind::Checkpoint, "checkpoint seq_len must be >= 1");
    SplitSpec split;
    split.train_years = static_cast<int>(meta_number(ck, "split.train_years"));
    split.val_fraction = meta_number(ck, "split.val_fraction");
    std::array<VariableStats, NormStats::kNumVariables> s;
    for (std::size_t v = 0; v < s.size(); ++v) s[v] = {meta_number(ck, norm_key(v, "mean")), meta_number(ck, norm_key(v, "std"))};
    NormStats stats(s);
    return {std::move(ck), static_cast<std::size_t>(seq_len), split, stats};
}

// -- Periods ----------------------------------------------------------------

DayRange period_range(const std::string& period, const ForcingSeries& f, const SplitSpec& split) {
    if (f.empty()) fail(ErrorKind::SeriesTooShort, "empty forcing series");
    if (period == "all") return {0, f.size()};
    const auto r = split_periods(f.front().date, f.size(), split);
    if (period == "train") return r.train;
    if (period == "validation") return r.validation;
    if (period == "test") return r.test;
    fail(ErrorKind::InvalidArgument, "unknown period '" + period + "' (expected " + kPeriodNames + ")");
}

std::vector<Sample> every_nth(std::vector<Sample> samples, std::size_t stride) {
    if (stride <= 1) return samples;
    std::vector<Sample> out;
    for (std::size_t i = 0; i < samples.size(); i += stride) out.push_back(samples[i]);
    return out;
}

ForcingSeries read_forcings(RunManifest& m, const fs::path& path) {
    auto f = parse_forcings(path);
    m.input("forcings", path);
    return f;
}

DischargeSeries read_discharge(RunManifest& m, const fs::path& path) {
    auto q = parse_discharge(path);
    m.input("discharge", path);
    return q;
}

Model read_model(RunManifest& m, const fs::path& path) {
    auto model = load_model(path);
    m.input("checkpoint", path);
    m.config("seq_len", static_cast<std::uint64_t>(model.seq_len));
    m.config("hidden", static_cast<std::uint64_t>(model.checkpoint.params.shape().hidden));
    return model;
}

std::vector<Date> dates_of(std::span<const Sample> samples) {
    std::vector<Date> d;
    d.reserve(samples.size());
    for (const auto& s : samples) d.push_back(s.prediction_date);
    return d;
}

std::vector<double> index_axis(std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
    return x;
}

// -- synth ------------------------------------------------------------------

struct SynthArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> n_days;
    std::optional<std::size_t> teacher_k;
};

int cmd_synth(const SynthArgs& a) {
    RunManifest m("synth", a.out);
    KeyValues kv;
    if (!a.config.empty()) {
        kv = KeyValues::load(a.config);
        m.input("config", a.config);
    }
    if (a.seed) kv.set("seed", std::to_string(*a.seed));
    if (a.n_days) kv.set("n_days", std::to_string(*a.n_days));
    const auto cfg = ToyCatchmentConfig::from(kv);
    kv.require_all_used();
    m.seed(cfg.seed);
    m.config("n_days", static_cast<std::uint64_t>(cfg.n_days));
    m.config("start", format_date(cfg.start));

    if (a.teacher_k) {
        m.config("teacher_k", static_cast<std::uint64_t>(*a.teacher_k));
        const auto task = linear_teacher_task(cfg.seed, cfg.n_days, *a.teacher_k);
        m.write("forcings.csv", [&](std::ostream& o) { write_forcings(o, task.forcings); });
        m.write("discharge.csv", [&](std::ostream& o) { write_discharge(o, task.target); });
        std::cout << "teacher task: trailing " << *a.teacher_k << "-day mean precipitation over " << cfg.n_days
                  << " days\n";
    } else {
        for (const auto& [k, v] : kv.entries()) m.config(k, v);
        const auto trace = generate(cfg);
        m.write("forcings.csv", [&](std::ostream& o) { write_forcings(o, trace.forcings); });
        m.write("discharge.csv", [&](std::ostream& o) { write_discharge(o, trace.discharge); });
        m.write("states.csv", [&](std::ostream& o) { write_proxy_states(o, trace.proxy_states()); });
        std::cout << "toy catchment: " << cfg.n_days << " days from " << format_date(cfg.start)
                  << ", water balance residual " << format_number(water_balance_residual(trace)) << " mm\n";
    }
    m.finish();
    return kExitOk;
}

// -- train ------------------------------------------------------------------

struct TrainArgs {
    std::string forcings, discharge, config, out;
    std::optional<std::size_t> epochs, batch_size, seq_len, hidden;
    std::optional<double> lr;
    std::optional<std::uint64_t> seed;
    bool save_epochs = false;
};

int cmd_train(const TrainArgs& a) {
    RunManifest m("train", a.out);
    KeyValues kv;
    if (!a.config.empty()) {
        kv = KeyValues::load(a.config);
        m.input("config", a.config);
    }
    if (a.epochs) kv.set("epochs", std::to_string(*a.epochs));
    if (a.batch_size) kv.set("batch_size", std::to_string(*a.batch_size));
    if (a.lr) kv.set("learning_rate", format_number(*a.lr));
    if (a.seed) kv.set("seed", std::to_string(*a.seed));
    if (a.seq_len) kv.set("seq_len", std::to_string(*a.seq_len));
    if (a.hidden) kv.set("hidden", std::to_string(*a.hidden));
    const TrainConfig tc = TrainConfig::from(kv);
    const auto seq_len = kv.get_uint("seq_len", 365);
    const auto hidden = kv.get_uint("hidden", 10);
    SplitSpec split;
    split.train_years = static_cast<int>(kv.get_int("train_years", split.train_years));
    split.val_fraction = kv.get_double("val_fraction", split.val_fraction);
    kv.require_all_used();
    if (seq_len < 1 || hidden < 1) fail(ErrorKind::InvalidArgument, "seq_len and hidden must be >= 1");

    m.seed(tc.seed);
    m.config("epochs", static_cast<std::uint64_t>(tc.epochs));
    m.config("learning_rate", tc.learning_rate);
    m.config("rmsprop_decay", tc.rmsprop_decay);
    m.config("rmsprop_epsilon", tc.rmsprop_epsilon);
    m.config("batch_size", static_cast<std::uint64_t>(tc.batch_size));
    m.config("gradient_clip_norm", tc.gradient_clip_norm);
    m.config("seq_len", static_cast<std::uint64_t>(seq_len));
    m.config("hidden", static_cast<std::uint64_t>(hidden));
    m.config("train_years", static_cast<std::uint64_t>(split.train_years));
    m.config("val_fraction", split.val_fraction);

    const auto f = read_forcings(m, a.forcings);
    const auto q = read_discharge(m, a.discharge);
    check_aligned(f, q);
    const auto ranges = split_periods(f.front().date, f.size(), split);
    const auto stats = compute_norm_stats(f, q, ranges.train);
    const auto train_s = make_samples(f, q, stats, seq_len, ranges.train);
    const auto val_s = make_samples(f, q, stats, seq_len, ranges.validation);
    std::vector<Sample> test_s;
    if (ranges.test.size() >= seq_len) test_s = make_samples(f, q, stats, seq_len, ranges.test);
    std::cout << "samples: train " << train_s.size() << ", validation " << val_s.size() << ", test " << test_s.size()
              << '\n';

    const ModelShape shape{kNumForcings, static_cast<std::size_t>(hidden)};
    auto make_checkpoint = [&](const ModelParams& p) {
        Checkpoint ck{p, {}};
        put_metadata(ck, seq_len, split, stats);
        ck.metadata["seed"] = std::to_string(tc.seed);
        return ck;
    };
    if (a.save_epochs) fs::create_directories(m.out_dir() / "epochs");
    const auto report = train(train_s, val_s, tc, shape, stats.discharge(), [&](const EpochRecord& r, const ModelParams& p) {
        std::cout << "epoch " << r.epoch << "  train_loss " << format_number(r.train_loss) << "  validation_nse "
                  << format_number(r.validation_nse) << std::endl;
        if (a.save_epochs) {
            char name[64];
            std::snprintf(name, sizeof name, "epochs/epoch_%03zu.ckpt", r.epoch);
            const auto ck = make_checkpoint(p);
            m.write(name, [&](std::ostream& o) { write_checkpoint(o, ck); });
        }
    });

    auto ck = make_checkpoint(report.params);
    ck.metadata["selected_epoch"] = std::to_string(report.selected_epoch);
    m.write("model.ckpt", [&](std::ostream& o) { write_checkpoint(o, ck); });
    m.write("training.csv", [&](std::ostream& o) {
        o << "epoch,train_loss,validation_nse,selected\n";
        for (const auto& r : report.epochs)
            o << r.epoch << ',' << format_number(r.train_loss) << ',' << format_number(r.validation_nse) << ','
              << (r.epoch == report.selected_epoch ? 1 : 0) << '\n';
    });
    const double train_nse = sample_nse(report.params, train_s, stats.discharge());
    const double val_nse = sample_nse(report.params, val_s, stats.discharge());
    std::optional<double> test_nse;
    if (test_s.size() >= 2) test_nse = sample_nse(report.params, test_s, stats.discharge());
    m.write("metrics.csv", [&](std::ostream& o) {
        o << "period,samples,nse\n";
        o << "train," << train_s.size() << ',' << format_number(train_nse) << '\n';
        o << "validation," << val_s.size() << ',' << format_number(val_nse) << '\n';
        if (test_nse) o << "test," << test_s.size() << ',' << format_number(*test_nse) << '\n';
    });
    std::cout << "selected epoch " << report.selected_epoch << ": validation NSE " << format_number(val_nse);
    if (test_nse) std::cout << ", test NSE " << format_number(*test_nse);
    std::cout << '\n';
    m.finish();
    return kExitOk;
}

// -- evaluate ---------------------------------------------------------------

struct EvaluateArgs {
    std::string checkpoint, forcings, discharge, out, period = "test";
};

int cmd_evaluate(const EvaluateArgs& a) {
    RunManifest m("evaluate", a.out);
    m.config("period", a.period);
    const auto model = read_model(m, a.checkpoint);
    const auto f = read_forcings(m, a.forcings);
    const auto q = read_discharge(m, a.discharge);
    check_aligned(f, q);
    const auto range = period_range(a.period, f, model.split);
    const auto samples = make_samples(f, q, model.stats, model.seq_len, range);
    const auto pred = predict_all(model.checkpoint.params, samples);
    std::vector<double> sim(samples.size()), obs(samples.size()), precip(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const std::size_t day = samples[k].start + samples[k].seq_len - 1;
        sim[k] = model.stats.discharge().denormalize(pred[k]);
        obs[k] = q[day].discharge;
        precip[k] = f[day].precip;
    }
    const double score = nse(sim, obs);
    m.write("nse.csv", [&](std::ostream& o) {
        o << "period,samples,nse\n" << a.period << ',' << samples.size() << ',' << format_number(score) << '\n';
    });
    m.write("hydrograph.csv", [&](std::ostream& o) {
        o << "date,observed,simulated,precip\n";
        for (std::size_t k = 0; k < samples.size(); ++k)
            o << format_date(samples[k].prediction_date) << ',' << format_number(obs[k]) << ','
              << format_number(sim[k]) << ',' << format_number(precip[k]) << '\n';
    });
    const auto dates = dates_of(samples);
    svg::XAxis axis{index_axis(samples.size()), svg::date_ticks(dates), "date"};
    svg::Panel rain{"Precipitation", "mm/day", {}, {}, {{"precip", precip, "#4a90d9"}}, false, 90.0};
    svg::Panel flow{"Discharge", "mm/day",
                    {{"observed", obs, "#222222"}, {"simulated", sim, "#d62728", true}}, {}, {}, false, 240.0};
    m.write("hydrograph.svg", [&](std::ostream& o) {
        o << svg::stacked_panels(a.period + " period, NSE " + format_number(score), axis, {rain, flow});
    });
    std::cout << a.period << " NSE " << format_number(score) << " over " << samples.size() << " days\n";
    m.finish();
    return kExitOk;
}

// -- tsoi -------------------------------------------------------------------

struct TsoiArgs {
    std::string checkpoint, forcings, discharge, out, period = "test";
    double threshold = kDefaultTsoiThreshold;
    std::size_t m = kDefaultIgSteps;
    std::size_t stride = 1;
};

/// Mean of `values` per day of year 1..366 over `days`; NaN where a day never occurs.
std::vector<double> doy_mean(std::span<const Date> days, std::span<const double> values) {
    std::vector<double> sum(366, 0.0), n(366, 0.0);
    for (std::size_t i = 0; i < days.size(); ++i) {
        const int d = day_of_year(days[i]) - 1;
        sum[d] += values[i];
        n[d] += 1.0;
    }
    for (std::size_t d = 0; d < 366; ++d) sum[d] = n[d] > 0 ? sum[d] / n[d] : std::nan("");
    return sum;
}

int cmd_tsoi(const TsoiArgs& a) {
    RunManifest m("tsoi", a.out);
    m.config("period", a.period);
    m.config("threshold", a.threshold);
    m.config("m", static_cast<std::uint64_t>(a.m));
    m.config("stride", static_cast<std::uint64_t>(a.stride));
    if (a.m < 1) fail(ErrorKind::InvalidArgument, "--m must be >= 1");
    const auto model = read_model(m, a.checkpoint);
    const auto f = read_forcings(m, a.forcings);
    std::optional<DischargeSeries> q;
    if (!a.discharge.empty()) {
        q = read_discharge(m, a.discharge);
        check_aligned(f, *q);
    }
    const auto range = period_range(a.period, f, model.split);
    const auto samples = every_nth(make_input_samples(f, model.stats, model.seq_len, range), a.stride);
    const auto results = tsoi_series(model.checkpoint.params, samples, a.threshold, a.m);
    const auto curve = doy_quantiles(results);
    m.write("tsoi.csv", [&](std::ostream& o) { write_tsoi_csv(o, results); });
    m.write("tsoi_quantiles.csv", [&](std::ostream& o) { write_quantile_csv(o, curve); });

    std::vector<double> q25(366, std::nan("")), q50(366, std::nan("")), q75(366, std::nan(""));
    for (const auto& c : curve) {
        q25[c.day_of_year - 1] = c.q25;
        q50[c.day_of_year - 1] = c.q50;
        q75[c.day_of_year - 1] = c.q75;
    }
    std::vector<Date> days;
    std::vector<double> precip, tmin, flow;
    for (std::size_t d = range.begin; d < range.end; ++d) {
        days.push_back(f[d].date);
        precip.push_back(f[d].precip);
        tmin.push_back(f[d].tmin);
        if (q) flow.push_back((*q)[d].discharge);
    }
    std::vector<double> x(366);
    for (std::size_t d = 0; d < 366; ++d) x[d] = static_cast<double>(d + 1);
    svg::XAxis axis{x, {}, "day of year"};
    for (int doy : {1, 32, 60, 91, 121, 152, 182, 213, 244, 274, 305, 335}) axis.ticks.emplace_back(doy, std::to_string(doy));
    std::vector<svg::Panel> panels;
    panels.push_back({"Time steps of influence", "days", {{"median", q50, "#1f4e9c"}}, {{"25-75 %", q25, q75, "#6f9fd8"}}, {}, false, 220.0});
    panels.push_back({"Mean precipitation", "mm/day", {}, {}, {{"precip", doy_mean(days, precip), "#4a90d9"}}, false, 90.0});
    if (q) panels.push_back({"Mean discharge", "mm/day", {{"discharge", doy_mean(days, flow), "#222222"}}, {}, {}, false, 90.0});
    panels.push_back({"Mean minimum temperature", "degC", {{"tmin", doy_mean(days, tmin), "#d62728"}}, {}, {}, true, 90.0});
    m.write("tsoi.svg", [&](std::ostream& o) { o << svg::stacked_panels("TSOI by day of year", axis, panels); });

    std::vector<double> all;
    for (const auto& r : results) all.push_back(static_cast<double>(r.tsoi));
    std::cout << results.size() << " samples, TSOI median " << format_number(quantile(all, 0.5)) << ", quartiles "
              << format_number(quantile(all, 0.25)) << " / " << format_number(quantile(all, 0.75)) << ", max "
              << format_number(*std::max_element(all.begin(), all.end())) << '\n';
    m.finish();
    return kExitOk;
}

// -- cells ------------------------------------------------------------------

struct CellsArgs {
    std::string checkpoint, forcings, states, out, period = "test";
    std::size_t stride = 1;
};

int cmd_cells(const CellsArgs& a) {
    RunManifest m("cells", a.out);
    m.config("period", a.period);
    m.config("stride", static_cast<std::uint64_t>(a.stride));
    const auto model = read_model(m, a.checkpoint);
    const auto f = read_forcings(m, a.forcings);
    const auto proxy = parse_proxy_states(a.states);
    m.input("states", a.states);
    const auto range = period_range(a.period, f, model.split);
    const auto samples = every_nth(make_input_samples(f, model.stats, model.seq_len, range), a.stride);
    const auto report = cell_state_correlations(model.checkpoint.params, samples, proxy);
    m.write("correlations.csv", [&](std::ostream& o) { write_correlation_csv(o, report, false); });
    m.write("correlations_masked.csv", [&](std::ostream& o) { write_correlation_csv(o, report, true); });
    m.write("correlations.svg", [&](std::ostream& o) { o << svg::correlation_grid(report, true); });
    std::cout << report.samples << " samples, " << report.skipped << " constant windows skipped\n";
    for (std::size_t k = 0; k < report.state_names.size(); ++k) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < report.mean.rows(); ++j)
            if (std::abs(report.mean(j, k)) > std::abs(report.mean(best, k))) best = j;
        std::cout << report.state_names[k] << ": strongest cell " << best << " (r = "
                  << format_number(report.mean(best, k)) << ")\n";
    }
    m.finish();
    return kExitOk;
}

// -- inspect-cell -----------------------------------------------------------

struct InspectArgs {
    std::string checkpoint, forcings, date, out, period = "test";
    std::size_t cell = 0;
    std::size_t m = kDefaultIgSteps;
};

int cmd_inspect_cell(const InspectArgs& a) {
    RunManifest m("inspect-cell", a.out);
    m.config("period", a.period);
    m.config("cell", static_cast<std::uint64_t>(a.cell));
    m.config("date", a.date);
    m.config("m", static_cast<std::uint64_t>(a.m));
    if (a.m < 1) fail(ErrorKind::InvalidArgument, "--m must be >= 1");
    const auto model = read_model(m, a.checkpoint);
    if (a.cell >= model.checkpoint.params.shape().hidden)
        fail(ErrorKind::InvalidArgument, "cell " + std::to_string(a.cell) + " out of range 0.." +
                                             std::to_string(model.checkpoint.params.shape().hidden - 1));
    const Date when = parse_date(a.date);
    const auto f = read_forcings(m, a.forcings);
    const auto range = period_range(a.period, f, model.split);
    const auto samples = make_input_samples(f, model.stats, model.seq_len, range);
    const auto it = std::find_if(samples.begin(), samples.end(), [&](const Sample& s) { return s.prediction_date == when; });
    if (it == samples.end())
        fail(ErrorKind::InvalidArgument, "no " + a.period + " sample ends on " + a.date + " (valid: " +
                                             format_date(samples.front().prediction_date) + " to " +
                                             format_date(samples.back().prediction_date) + ")");
    const auto insp = inspect_cell(model.checkpoint.params, *it, a.cell, model.stats, a.m);
    const auto x = it->inputs();
    const Matrix zero(x.rows(), x.cols());
    AttributionMatrix direction = insp.attribution;
    direction.values = influence_direction(insp.attribution, x, zero);

    const Date first = insp.dates.front();
    m.write("attribution.csv", [&](std::ostream& o) { write_attribution_csv(o, insp.attribution, first); });
    m.write("influence.csv", [&](std::ostream& o) { write_attribution_csv(o, direction, first); });
    m.write("trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, insp); });
    m.write("temperature.csv", [&](std::ostream& o) { write_temperature_csv(o, insp); });

    static const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"};
    const std::size_t T = insp.dates.size();
    svg::Panel ig{"Integrated gradients on cell " + std::to_string(a.cell), "attribution", {}, {}, {}, true, 200.0};
    for (std::size_t i = 0; i < kNumForcings; ++i) {
        std::vector<double> col(T);
        for (std::size_t t = 0; t < T; ++t) col[t] = insp.attribution.values(t, i);
        ig.lines.push_back({std::string(kForcingNames[i]), col, kColors[i]});
    }
    svg::Panel traj{"Cell state", "c_t", {{"cell " + std::to_string(a.cell), insp.trajectory, "#222222"}}, {}, {}, true, 140.0};
    std::vector<double> tmin(T), tmax(T);
    for (std::size_t t = 0; t < T; ++t) {
        tmin[t] = insp.temperatures(t, 0);
        tmax[t] = insp.temperatures(t, 1);
    }
    svg::Panel temp{"Temperature", "degC", {{"tmin", tmin, "#2166ac"}, {"tmax", tmax, "#b2182b"}}, {}, {}, true, 140.0};
    svg::XAxis axis{index_axis(T), svg::date_ticks(insp.dates), "date"};
    m.write("inspect_cell.svg", [&](std::ostream& o) {
        o << svg::stacked_panels("Cell " + std::to_string(a.cell) + ", window ending " + a.date, axis, {ig, traj, temp});
    });

    std::size_t freezing = 0, opposite = 0;
    const std::size_t P = index_of(Forcing::Precip), S = index_of(Forcing::Srad);
    for (std::size_t t = 0; t < T; ++t) {
        if (insp.temperatures(t, 0) >= 0.0) continue;
        ++freezing;
        const double dp = direction.values(t, P), ds = direction.values(t, S);
        if ((dp > 0 && ds < 0) || (dp < 0 && ds > 0)) ++opposite;
    }
    std::cout << "cell " << a.cell << ": F(x) " << format_number(insp.attribution.target_at_input) << ", F(baseline) "
              << format_number(insp.attribution.target_at_baseline) << ", completeness residual "
              << format_number(insp.attribution.residual) << '\n'
              << "freezing days " << freezing << ", precip/srad influence opposite-signed on " << opposite << '\n';
    m.finish();
    return kExitOk;
}

// -- construct --------------------------------------------------------------

struct ConstructArgs {
    std::string kind, forcings, discharge, out;
    std::size_t seq_len = 365;
    std::size_t k = 30;
    std::size_t cell = 4;
    std::size_t hidden = 10;
    std::uint64_t seed = 0;
    int train_years = 15;
    double val_fraction = 0.25;
};

int cmd_construct(const ConstructArgs& a) {
    RunManifest m("construct", a.out);
    m.config("kind", a.kind);
    m.config("seq_len", static_cast<std::uint64_t>(a.seq_len));
    m.config("hidden", static_cast<std::uint64_t>(a.hidden));
    m.seed(a.seed);
    const SplitSpec split{a.train_years, a.val_fraction};
    m.config("train_years", static_cast<std::uint64_t>(split.train_years));
    m.config("val_fraction", split.val_fraction);
    const auto f = read_forcings(m, a.forcings);
    const auto q = read_discharge(m, a.discharge);
    check_aligned(f, q);
    const auto ranges = split_periods(f.front().date, f.size(), split);
    const auto stats = compute_norm_stats(f, q, ranges.train);
    const ModelShape shape{kNumForcings, a.hidden};
    Checkpoint ck;
    if (a.kind == "memory") {
        m.config("k", static_cast<std::uint64_t>(a.k));
        ck.params = constructed_memory_model(a.k, a.seq_len, shape);
    } else if (a.kind == "blind") {
        ck.params = constructed_blind_model(a.seed, shape);
    } else if (a.kind == "snow") {
        m.config("cell", static_cast<std::uint64_t>(a.cell));
        ck.params = constructed_snow_cell_model(stats, a.cell, shape);
    } else {
        fail(ErrorKind::InvalidArgument, "unknown --kind '" + a.kind + "' (expected memory, blind or snow)");
    }
    put_metadata(ck, a.seq_len, split, stats);
    ck.metadata["constructed"] = a.kind;
    m.write("model.ckpt", [&](std::ostream& o) { write_checkpoint(o, ck); });
    std::cout << "constructed " << a.kind << " model, " << ck.params.size() << " parameters\n";
    m.finish();
    return kExitOk;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Io: return kExitIo;
        case ErrorKind::DivergedTraining: return kExitDiverged;
        default: return kExitInvalid;
    }
}

}  // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"LSTM rainfall-runoff modelling with integrated-gradients interpretation"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    SynthArgs synth;
    auto* s = app.add_subcommand("synth", "Generate the synthetic snow catchment or the linear teacher task");
    s->add_option("--config", synth.config, "key = value file of toy catchment parameters")->check(CLI::ExistingFile);
    s->add_option("--out", synth.out, "output directory")->required();
    s->add_option("--seed", synth.seed, "weather seed (overrides the config)");
    s->add_option("--n-days", synth.n_days, "length in days (overrides the config)");
    s->add_option("--teacher", synth.teacher_k, "emit the trailing k-day mean precipitation task instead");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train an LSTM and keep the best-validation epoch");
    t->add_option("--forcings", tr.forcings, "forcings CSV")->required();
    t->add_option("--discharge", tr.discharge, "discharge CSV")->required();
    t->add_option("--config", tr.config, "key = value training config");
    t->add_option("--out", tr.out, "output directory")->required();
    t->add_option("--epochs", tr.epochs, "epochs (default 50)");
    t->add_option("--lr", tr.lr, "RMSprop learning rate (default 1e-2)");
    t->add_option("--batch-size", tr.batch_size, "mini-batch size (default 256)");
    t->add_option("--seed", tr.seed, "initialisation and shuffling seed (default 0)");
    t->add_option("--seq-len", tr.seq_len, "input window length (default 365)");
    t->add_option("--hidden", tr.hidden, "memory cells (default 10)");
    t->add_flag("--save-epochs", tr.save_epochs, "also write a checkpoint after every epoch");

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "NSE and hydrograph of a checkpoint on one period");
    e->add_option("--checkpoint", ev.checkpoint)->required();
    e->add_option("--forcings", ev.forcings)->required();
    e->add_option("--discharge", ev.discharge)->required();
    e->add_option("--out", ev.out)->required();
    e->add_option("--period", ev.period, kPeriodNames)->capture_default_str();

    TsoiArgs ts;
    auto* o = app.add_subcommand("tsoi", "Time steps of influence per sample and by day of year");
    o->add_option("--checkpoint", ts.checkpoint)->required();
    o->add_option("--forcings", ts.forcings)->required();
    o->add_option("--discharge", ts.discharge, "discharge CSV for the reference panel");
    o->add_option("--out", ts.out)->required();
    o->add_option("--threshold", ts.threshold)->capture_default_str();
    o->add_option("--m", ts.m, "integrated-gradients steps")->capture_default_str();
    o->add_option("--stride", ts.stride, "analyse every n-th sample")->capture_default_str()->check(CLI::PositiveNumber);
    o->add_option("--period", ts.period, kPeriodNames)->capture_default_str();

    CellsArgs ce;
    auto* c = app.add_subcommand("cells", "Correlate memory cells with hydrological states");
    c->add_option("--checkpoint", ce.checkpoint)->required();
    c->add_option("--forcings", ce.forcings)->required();
    c->add_option("--states", ce.states, "states CSV (date plus one column per state)")->required();
    c->add_option("--out", ce.out)->required();
    c->add_option("--stride", ce.stride, "analyse every n-th sample")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--period", ce.period, kPeriodNames)->capture_default_str();

    InspectArgs in;
    auto* i = app.add_subcommand("inspect-cell", "Attribute one memory cell to the inputs of one window");
    i->add_option("--checkpoint", in.checkpoint)->required();
    i->add_option("--forcings", in.forcings)->required();
    i->add_option("--cell", in.cell)->required();
    i->add_option("--date", in.date, "prediction date YYYY-MM-DD")->required();
    i->add_option("--m", in.m, "integrated-gradients steps")->capture_default_str();
    i->add_option("--period", in.period, kPeriodNames)->capture_default_str();
    i->add_option("--out", in.out)->required();

    ConstructArgs co;
    auto* k = app.add_subcommand("construct", "Write a checkpoint with hand-set weights (memory, blind, snow)");
    k->add_option("--kind", co.kind)->required();
    k->add_option("--forcings", co.forcings)->required();
    k->add_option("--discharge", co.discharge)->required();
    k->add_option("--out", co.out)->required();
    k->add_option("--seq-len", co.seq_len)->capture_default_str();
    k->add_option("--k", co.k, "memory horizon in days")->capture_default_str();
    k->add_option("--cell", co.cell, "snow cell index")->capture_default_str();
    k->add_option("--hidden", co.hidden)->capture_default_str();
    k->add_option("--seed", co.seed)->capture_default_str();
    k->add_option("--train-years", co.train_years)->capture_default_str();
    k->add_option("--val-fraction", co.val_fraction)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (s->parsed()) return cmd_synth(synth);
        if (t->parsed()) return cmd_train(tr);
        if (e->parsed()) return cmd_evaluate(ev);
        if (o->parsed()) return cmd_tsoi(ts);
        if (c->parsed()) return cmd_cells(ce);
        if (i->parsed()) return cmd_inspect_cell(in);
        if (k->parsed()) return cmd_construct(co);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return exit_code(err.kind());
    } catch (const fs::filesystem_error& err) {
        std::cerr << "error (io): " << err.what() << '\n';
        return kExitIo;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitInvalid;
    }
    return kExitInvalid;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> storage;
    storage.reserve(args.size() + 1);
    storage.push_back("hydrolstm");
    storage.insert(storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : storage) argv.push_back(a.data());
    argv.push_back(nullptr);
    return run_cli(static_cast<int>(storage.size()), argv.data());
}

}  // namespace hydrolstm::cli
