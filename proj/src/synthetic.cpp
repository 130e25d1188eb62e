#include "hydrolstm/synthetic.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>
#include <optional>
#include <random>

#include "hydrolstm/error.hpp"

namespace hydrolstm {

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double exponential() { return -std::log1p(-uniform()); }
    double normal() {
        // Box-Muller, both variates used.
        if (spare_) {
            const double v = *spare_;
            spare_.reset();
            return v;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

double seasonal(int doy, double peak_doy) {
    return std::cos(2.0 * std::numbers::pi * (static_cast<double>(doy) - peak_doy) / 365.25);
}

}  // namespace

void ToyCatchmentConfig::validate() const {
    if (n_days < 730) fail(ErrorKind::InvalidArgument, "toy catchment needs n_days >= 730");
    if (!(soil_recession > 0.0 && soil_recession < 1.0))
        fail(ErrorKind::InvalidArgument, "soil_recession must lie in (0, 1)");
    if (!(et_fraction >= 0.0 && soil_recession + et_fraction < 1.0))
        fail(ErrorKind::InvalidArgument, "et_fraction must be >= 0 with recession + et_fraction < 1");
    if (!(degree_day_factor > 0.0)) fail(ErrorKind::InvalidArgument, "degree_day_factor must be > 0");
    if (sublimation_factor < 0.0 || initial_snow < 0.0 || initial_soil < 0.0)
        fail(ErrorKind::InvalidArgument, "sublimation factor and initial stores must be >= 0");
    if (wet_probability < 0.0 || mean_wet_amount < 0.0 || precip_noise < 0.0 || precip_noise > 1.0)
        fail(ErrorKind::InvalidArgument, "precipitation parameters out of range");
    if (diurnal_range < 0.0 || temp_noise < 0.0 || srad_noise < 0.0 || vp_noise < 0.0)
        fail(ErrorKind::InvalidArgument, "noise scales and diurnal range must be >= 0");
}

ToyCatchmentConfig ToyCatchmentConfig::from(const KeyValues& kv) {
    ToyCatchmentConfig c;
    c.seed = kv.get_uint("seed", c.seed);
    c.n_days = static_cast<std::size_t>(kv.get_uint("n_days", c.n_days));
    c.start = parse_date(kv.get_string("start", format_date(c.start)));
    c.degree_day_factor = kv.get_double("degree_day_factor", c.degree_day_factor);
    c.soil_recession = kv.get_double("soil_recession", c.soil_recession);
    c.et_fraction = kv.get_double("et_fraction", c.et_fraction);
    c.sublimation_factor = kv.get_double("sublimation_factor", c.sublimation_factor);
    c.initial_snow = kv.get_double("initial_snow", c.initial_snow);
    c.initial_soil = kv.get_double("initial_soil", c.initial_soil);
    c.wet_probability = kv.get_double("wet_probability", c.wet_probability);
    c.wet_probability_amplitude = kv.get_double("wet_probability_amplitude", c.wet_probability_amplitude);
    c.mean_wet_amount = kv.get_double("mean_wet_amount", c.mean_wet_amount);
    c.precip_amplitude = kv.get_double("precip_amplitude", c.precip_amplitude);
    c.precip_noise = kv.get_double("precip_noise", c.precip_noise);
    c.precip_peak_doy = kv.get_double("precip_peak_doy", c.precip_peak_doy);
    c.temp_mean = kv.get_double("temp_mean", c.temp_mean);
    c.temp_amplitude = kv.get_double("temp_amplitude", c.temp_amplitude);
    c.temp_peak_doy = kv.get_double("temp_peak_doy", c.temp_peak_doy);
    c.temp_noise = kv.get_double("temp_noise", c.temp_noise);
    c.diurnal_range = kv.get_double("diurnal_range", c.diurnal_range);
    c.srad_mean = kv.get_double("srad_mean", c.srad_mean);
    c.srad_amplitude = kv.get_double("srad_amplitude", c.srad_amplitude);
    c.srad_noise = kv.get_double("srad_noise", c.srad_noise);
    c.srad_peak_doy = kv.get_double("srad_peak_doy", c.srad_peak_doy);
    c.vp_mean = kv.get_double("vp_mean", c.vp_mean);
    c.vp_amplitude = kv.get_double("vp_amplitude", c.vp_amplitude);
    c.vp_noise = kv.get_double("vp_noise", c.vp_noise);
    c.validate();
    return c;
}

ProxyStateSeries ToyTrace::proxy_states() const {
    ProxyStateSeries p;
    p.names = {"SWE", "SOIL"};
    p.values = Matrix(forcings.size(), 2);
    p.dates.reserve(forcings.size());
    for (std::size_t d = 0; d < forcings.size(); ++d) {
        p.dates.push_back(forcings[d].date);
        p.values(d, 0) = snow[d];
        p.values(d, 1) = soil[d];
    }
    return p;
}

ToyTrace generate(const ToyCatchmentConfig& config) {
    config.validate();
    Rng rng(config.seed);
    ToyTrace out;
    out.initial_snow = config.initial_snow;
    out.initial_soil = config.initial_soil;
    out.forcings.reserve(config.n_days);
    out.discharge.reserve(config.n_days);

    double snow = config.initial_snow;
    double soil = config.initial_soil;
    double temp_anomaly = 0.0;
    constexpr double kPersistence = 0.7;
    const double innovation = std::sqrt(1.0 - kPersistence * kPersistence);

    for (std::size_t d = 0; d < config.n_days; ++d) {
        const Date date = config.start + std::chrono::days{static_cast<long>(d)};
        const int doy = day_of_year(date);

        // Draw order is fixed so every series is reproducible from the seed alone.
        const double u_wet = rng.uniform();
        const double amount_noise = rng.exponential();
        const double z_temp = rng.normal();
        const double z_srad = rng.normal();
        const double z_vp = rng.normal();

        const double p_wet = std::clamp(
            config.wet_probability + config.wet_probability_amplitude * seasonal(doy, config.precip_peak_doy), 0.0,
            1.0);
        double precip = 0.0;
        if (u_wet < p_wet) {
            const double scale = config.mean_wet_amount *
                                 std::max(0.0, 1.0 + config.precip_amplitude * seasonal(doy, config.precip_peak_doy));
            precip = scale * ((1.0 - config.precip_noise) + config.precip_noise * amount_noise);
        }

        temp_anomaly = kPersistence * temp_anomaly + innovation * config.temp_noise * z_temp;
        const double tmean = config.temp_mean + config.temp_amplitude * seasonal(doy, config.temp_peak_doy) + temp_anomaly;
        const double tmin = tmean - 0.5 * config.diurnal_range;
        const double tmax = tmean + 0.5 * config.diurnal_range;
        const double srad = std::max(
            0.0, config.srad_mean + config.srad_amplitude * seasonal(doy, config.srad_peak_doy) + config.srad_noise * z_srad);
        const double vp = std::max(
            0.0, config.vp_mean + config.vp_amplitude * seasonal(doy, config.temp_peak_doy) + config.vp_noise * z_vp);

        const bool freezing = tmin < 0.0;
        const double snowfall = freezing ? precip : 0.0;
        const double rain = freezing ? 0.0 : precip;
        snow += snowfall;
        const double melt = std::min(snow, config.degree_day_factor * std::max(tmax, 0.0));
        snow -= melt;
        const double sublimation = std::min(snow, config.sublimation_factor * srad);
        snow -= sublimation;

        soil += rain + melt;
        const double q = config.soil_recession * soil;
        const double et = config.et_fraction * soil;
        soil -= q + et;

        out.forcings.push_back({date, precip, srad, tmin, tmax, vp});
        out.discharge.push_back({date, q});
        out.snow.push_back(snow);
        out.soil.push_back(soil);
        out.evapotranspiration.push_back(et);
        out.sublimation.push_back(sublimation);
    }
    return out;
}

double water_balance_residual(const ToyTrace& trace) {
    double inputs = trace.initial_snow + trace.initial_soil;
    double outputs = 0.0;
    for (std::size_t d = 0; d < trace.forcings.size(); ++d) {
        inputs += trace.forcings[d].precip;
        outputs += trace.discharge[d].discharge + trace.evapotranspiration[d] + trace.sublimation[d];
    }
    if (!trace.snow.empty()) outputs += trace.snow.back() + trace.soil.back();
    return inputs - outputs;
}

TeacherTask linear_teacher_task(std::uint64_t seed, std::size_t n_days, std::size_t k) {
    if (k < 1 || k > 365) fail(ErrorKind::InvalidArgument, "teacher horizon k must lie in [1, 365]");
    ToyCatchmentConfig config;
    config.seed = seed;
    config.n_days = std::max<std::size_t>(n_days, 730);
    TeacherTask task;
    task.forcings = generate(config).forcings;
    task.forcings.resize(n_days);
    task.target.reserve(n_days);
    double window = 0.0;
    for (std::size_t d = 0; d < n_days; ++d) {
        window += task.forcings[d].precip;
        if (d >= k) window -= task.forcings[d - k].precip;
        // Recompute periodically so the running sum never drifts.
        if (d % 1024 == 0) {
            window = 0.0;
            for (std::size_t j = d + 1 >= k ? d + 1 - k : 0; j <= d; ++j) window += task.forcings[j].precip;
        }
        task.target.push_back({task.forcings[d].date, std::max(0.0, window / static_cast<double>(k))});
    }
    return task;
}

ModelParams constructed_blind_model(std::uint64_t seed, ModelShape shape) {
    ModelParams p = init_params(seed, shape);
    for (std::size_t j = 0; j < shape.hidden; ++j) {
        for (std::size_t i = 0; i < shape.input_dim; ++i) p.w(Gate::Input, j, i) = 0.0;
        for (std::size_t h = 0; h < shape.hidden; ++h) p.u(Gate::Input, j, h) = 0.0;
        p.bias(Gate::Input, j) = -60.0;
        p.bias(Gate::Forget, j) = 60.0;
    }
    return p;
}

ModelParams constructed_memory_model(std::size_t k, std::size_t seq_len, ModelShape shape) {
    if (shape.hidden < 2 || shape.input_dim < 1) fail(ErrorKind::InvalidArgument, "memory model needs hidden >= 2");
    if (k < 1 || k + 2 > seq_len) fail(ErrorKind::InvalidArgument, "memory horizon must satisfy 1 <= k <= seq_len - 2");
    constexpr std::size_t kClock = 0;
    constexpr std::size_t kAccumulator = 1;
    constexpr double kOpen = 40.0;  // sigma(40) = 1 - 4e-18
    ModelParams p(shape);

    // Clock: c_t = t * delta exactly up to gate saturation, h_t = tanh(c_t).
    const double open_at = static_cast<double>(seq_len - k);  // last step (1-based) with the gate shut
    const double delta = 0.5 / open_at;
    p.bias(Gate::Input, kClock) = kOpen;
    p.bias(Gate::Forget, kClock) = kOpen;
    p.bias(Gate::Output, kClock) = kOpen;
    p.bias(Gate::Cell, kClock) = std::atanh(delta);

    // The forget gate at step t reads h_{t-1}; it opens once t - 1 >= seq_len - k + 1, so
    // c_T sums the candidates of steps seq_len - k + 1 .. seq_len (exactly k steps).
    const double threshold = std::tanh((open_at + 0.5) * delta);
    const double margin = std::tanh((open_at + 1.0) * delta) - threshold;
    const double steepness = kOpen / margin;
    p.u(Gate::Forget, kAccumulator, kClock) = steepness;
    p.bias(Gate::Forget, kAccumulator) = -steepness * threshold;
    p.bias(Gate::Input, kAccumulator) = kOpen;
    p.bias(Gate::Output, kAccumulator) = kOpen;
    p.w(Gate::Cell, kAccumulator, index_of(Forcing::Precip)) = 0.1;

    p.dense_weight(kAccumulator) = 1.0;
    return p;
}

ModelParams constructed_snow_cell_model(const NormStats& stats, std::size_t cell, ModelShape shape) {
    if (cell >= shape.hidden || shape.input_dim < kNumForcings)
        fail(ErrorKind::InvalidArgument, "snow cell index out of range or too few inputs");
    constexpr double kOpen = 40.0;
    constexpr double kFreezeSteepness = 25.0;  // per normalized tmin unit
    constexpr double kScale = 0.05;
    ModelParams p(shape);
    const double zero_celsius = stats.forcing(Forcing::Tmin).normalize(0.0);
    // Input gate open iff tmin < 0 degC.
    p.w(Gate::Input, cell, index_of(Forcing::Tmin)) = -kFreezeSteepness;
    p.bias(Gate::Input, cell) = kFreezeSteepness * zero_celsius;
    p.bias(Gate::Forget, cell) = kOpen;
    p.bias(Gate::Output, cell) = kOpen;
    p.w(Gate::Cell, cell, index_of(Forcing::Precip)) = kScale;
    p.w(Gate::Cell, cell, index_of(Forcing::Srad)) = -kScale;
    p.dense_weight(cell) = 1.0;
    return p;
}

}  // namespace hydrolstm
