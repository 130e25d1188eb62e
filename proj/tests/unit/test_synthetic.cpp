#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hydrolstm/config.hpp"
#include "hydrolstm/error.hpp"
#include "hydrolstm/synthetic.hpp"

namespace hydrolstm {
namespace {

ToyCatchmentConfig dry_config() {
    ToyCatchmentConfig c;
    c.n_days = 730;
    c.wet_probability = 0.0;
    c.wet_probability_amplitude = 0.0;
    return c;
}

TEST(ToyCatchment, DrySoilDecaysGeometrically) {
    const auto c = dry_config();
    const auto t = generate(c);
    const double keep = 1.0 - c.soil_recession - c.et_fraction;
    double soil = c.initial_soil;
    for (std::size_t d = 0; d < 100; ++d) {
        EXPECT_NEAR(t.discharge[d].discharge, c.soil_recession * soil, 1e-12 * c.initial_soil);
        soil *= keep;
        EXPECT_NEAR(t.soil[d], soil, 1e-12 * c.initial_soil);
        EXPECT_EQ(t.snow[d], 0.0);
    }
}

TEST(ToyCatchment, ColdSteadyWeatherOnlyAccumulatesSnow) {
    ToyCatchmentConfig c;
    c.n_days = 730;
    c.temp_mean = -30.0;
    c.temp_amplitude = 0.0;
    c.temp_noise = 0.0;
    c.sublimation_factor = 0.0;
    const auto t = generate(c);
    double cumulative = c.initial_snow;
    for (std::size_t d = 0; d < t.forcings.size(); ++d) {
        cumulative += t.forcings[d].precip;
        EXPECT_NEAR(t.snow[d], cumulative, 1e-9);
        if (d > 0) {
            EXPECT_GE(t.snow[d], t.snow[d - 1]);
            EXPECT_LT(t.discharge[d].discharge, t.discharge[d - 1].discharge);
        }
    }
}

TEST(ToyCatchment, WaterBalanceCloses) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        ToyCatchmentConfig c;
        c.seed = seed;
        c.initial_snow = 12.5;
        const auto t = generate(c);
        EXPECT_LT(std::abs(water_balance_residual(t)), 1e-10 * std::max(1.0, t.forcings.size() * 10.0));
        EXPECT_EQ(t.forcings.size(), c.n_days);
        EXPECT_EQ(t.forcings.front().date, c.start);
        EXPECT_EQ(t.discharge.back().date, t.forcings.back().date);
    }
}

TEST(ToyCatchment, PhysicalRangesAndSeasonalSnow) {
    const auto t = generate(ToyCatchmentConfig{});
    double winter = 0.0, summer = 0.0;
    for (std::size_t d = 0; d < t.forcings.size(); ++d) {
        const auto& f = t.forcings[d];
        EXPECT_GE(f.precip, 0.0);
        EXPECT_GE(f.srad, 0.0);
        EXPECT_GE(f.vp, 0.0);
        EXPECT_LE(f.tmin, f.tmax);
        EXPECT_GE(t.snow[d], 0.0);
        EXPECT_GE(t.soil[d], 0.0);
        const int doy = day_of_year(f.date);
        if (doy > 45 && doy < 75) winter += t.snow[d];
        if (doy > 200 && doy < 230) summer += t.snow[d];
    }
    EXPECT_GT(winter, 10.0 * summer);
}

TEST(ToyCatchment, SeedDeterminism) {
    ToyCatchmentConfig c;
    c.n_days = 1000;
    const auto a = generate(c);
    const auto b = generate(c);
    EXPECT_EQ(a.forcings, b.forcings);
    EXPECT_EQ(a.discharge, b.discharge);
    EXPECT_EQ(a.snow, b.snow);
    c.seed = 2;
    EXPECT_NE(generate(c).forcings, a.forcings);
}

TEST(ToyCatchment, EmittedFilesReparse) {
    ToyCatchmentConfig c;
    c.n_days = 800;
    const auto t = generate(c);
    std::stringstream f, q, s;
    write_forcings(f, t.forcings);
    write_discharge(q, t.discharge);
    write_proxy_states(s, t.proxy_states());
    EXPECT_EQ(parse_forcings(f, "forcings"), t.forcings);
    EXPECT_EQ(parse_discharge(q, "discharge"), t.discharge);
    const auto proxy = parse_proxy_states(s, "states");
    EXPECT_EQ(proxy.names, (std::vector<std::string>{"SWE", "SOIL"}));
    EXPECT_EQ(proxy.values, t.proxy_states().values);
}

TEST(ToyCatchment, ConfigValidation) {
    ToyCatchmentConfig c;
    c.n_days = 100;
    EXPECT_THROW(generate(c), Error);
    c = {};
    c.soil_recession = 0.0;
    EXPECT_THROW(c.validate(), Error);

    std::istringstream in("seed = 4\nn_days = 900\nstart = 1990-01-01\n");
    auto kv = KeyValues::parse(in, "cfg");
    const auto parsed = ToyCatchmentConfig::from(kv);
    EXPECT_EQ(parsed.seed, 4u);
    EXPECT_EQ(parsed.n_days, 900u);
    EXPECT_EQ(format_date(parsed.start), "1990-01-01");
}

TEST(TeacherTask, OneDayHorizonIsTodaysPrecipitation) {
    const auto task = linear_teacher_task(3, 400, 1);
    ASSERT_EQ(task.target.size(), 400u);
    for (std::size_t d = 0; d < 400; ++d) EXPECT_NEAR(task.target[d].discharge, task.forcings[d].precip, 1e-12);
}

TEST(TeacherTask, TrailingMeanOverExactlyKDays) {
    const std::size_t k = 30;
    const auto task = linear_teacher_task(5, 2100, k);
    for (std::size_t d = 0; d < task.target.size(); ++d) {
        double sum = 0.0;
        for (std::size_t j = d + 1 >= k ? d + 1 - k : 0; j <= d; ++j) sum += task.forcings[j].precip;
        EXPECT_NEAR(task.target[d].discharge, sum / static_cast<double>(k), 1e-9) << "day " << d;
    }
}

TEST(TeacherTask, HorizonOutOfRange) {
    EXPECT_THROW(linear_teacher_task(1, 400, 0), Error);
    EXPECT_THROW(linear_teacher_task(1, 400, 366), Error);
}

TEST(ConstructedModels, BlindModelOutputsDenseBias) {
    auto p = constructed_blind_model(2);
    p.dense_bias() = 0.25;
    Matrix x(50, 5);
    for (std::size_t t = 0; t < 50; ++t)
        for (std::size_t i = 0; i < 5; ++i) x(t, i) = std::sin(static_cast<double>(t * 5 + i));
    EXPECT_EQ(predict(x, p), 0.25);
}

TEST(ConstructedModels, ArgumentChecks) {
    EXPECT_THROW(constructed_memory_model(0, 100), Error);
    EXPECT_THROW(constructed_memory_model(99, 100), Error);
    EXPECT_THROW(constructed_memory_model(5, 100, ModelShape{5, 1}), Error);
    const NormStats stats({VariableStats{}, {}, {}, {}, {}, {}});
    EXPECT_THROW(constructed_snow_cell_model(stats, 10), Error);
}

}  // namespace
}  // namespace hydrolstm
