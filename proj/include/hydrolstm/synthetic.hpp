#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hydrolstm/config.hpp"
#include "hydrolstm/data_io.hpp"
#include "hydrolstm/lstm.hpp"

namespace hydrolstm {

/// Degree-day snow store feeding a single linear soil reservoir, driven by seasonal
/// stochastic weather. Serves as a ground-truth stand-in for a conceptual model's states.
struct ToyCatchmentConfig {
    std::uint64_t seed = 1;
    std::size_t n_days = 12053;  // ~33 years
    Date start = Date{std::chrono::year{1980} / std::chrono::October / 1};

    // Stores
    double degree_day_factor = 3.0;   // mm / degC / day
    double soil_recession = 0.05;     // 1/day, discharge = recession * soil
    double et_fraction = 0.01;        // 1/day, evapotranspiration = et_fraction * soil
    double sublimation_factor = 0.012;  // mm/day per W/m2 of radiation, while snow is present
    double initial_snow = 0.0;        // mm
    double initial_soil = 50.0;       // mm

    // Precipitation: wet-day occurrence and amount, both seasonally modulated.
    double wet_probability = 0.35;
    double wet_probability_amplitude = 0.15;
    double mean_wet_amount = 7.0;     // mm
    double precip_amplitude = 0.3;    // relative seasonal swing of the amount
    double precip_noise = 1.0;        // 0 = constant amount, 1 = exponential amounts
    double precip_peak_doy = 15.0;

    // Temperature: daily mean with AR(1) anomalies; tmin/tmax split by the diurnal range.
    double temp_mean = 3.0;           // degC
    double temp_amplitude = 10.0;
    double temp_peak_doy = 200.0;
    double temp_noise = 2.5;
    double diurnal_range = 10.0;

    // Radiation and vapor pressure: seasonal cycle plus independent noise.
    double srad_mean = 180.0;         // W/m2
    double srad_amplitude = 90.0;
    double srad_noise = 40.0;
    double srad_peak_doy = 172.0;
    double vp_mean = 700.0;           // Pa
    double vp_amplitude = 350.0;
    double vp_noise = 120.0;

    void validate() const;
    static ToyCatchmentConfig from(const KeyValues& kv);
};

struct ToyTrace {
    ForcingSeries forcings;
    DischargeSeries discharge;
    std::vector<double> snow;          // end-of-day store, mm
    std::vector<double> soil;          // end-of-day store, mm
    std::vector<double> evapotranspiration;
    std::vector<double> sublimation;
    double initial_snow = 0.0;
    double initial_soil = 0.0;

    /// States as a proxy series with columns SWE and SOIL.
    ProxyStateSeries proxy_states() const;
};

/// Daily loop: snowfall when tmin < 0 else rain; melt = ddf * max(tmax, 0) capped by the snow
/// store; radiation-driven sublimation from the remaining snow; soil gains rain + melt and loses
/// recession * soil as discharge and et_fraction * soil as evapotranspiration.
ToyTrace generate(const ToyCatchmentConfig& config);

/// (inputs + initial stores) - (outputs + final stores); zero up to rounding.
double water_balance_residual(const ToyTrace& trace);

struct TeacherTask {
    ForcingSeries forcings;
    DischargeSeries target;  // trailing k-day mean precipitation, mm/day
};

/// Target(day) = mean precipitation over the trailing `k` days (days before the series count as dry),
/// so the true dependence horizon is exactly k. Forcings come from the default toy weather.
TeacherTask linear_teacher_task(std::uint64_t seed, std::size_t n_days, std::size_t k);

// -- Constructed-weight oracle models ---------------------------------------

/// Input gates shut everywhere: output is b_d regardless of the inputs.
ModelParams constructed_blind_model(std::uint64_t seed, ModelShape shape = {});

/// Output depends on precipitation of exactly the last `k` steps of a `seq_len` window.
///
/// Unit 0 is an input-independent clock (c_t ~ t * delta); unit 1 accumulates tanh(0.1 * precip)
/// with a forget gate that the clock holds shut until step seq_len - k + 1. y = tanh(c_1[T]).
ModelParams constructed_memory_model(std::size_t k, std::size_t seq_len, ModelShape shape = {});

/// Unit `cell` stores tanh(a * precip - a * srad) only on days with tmin below 0 degC
/// (located through `stats`), never forgets, and drives the output.
ModelParams constructed_snow_cell_model(const NormStats& stats, std::size_t cell = 4, ModelShape shape = {});

}  // namespace hydrolstm
