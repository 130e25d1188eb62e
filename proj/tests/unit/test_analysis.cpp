#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hydrolstm/analysis.hpp"
#include "hydrolstm/error.hpp"
#include "hydrolstm/synthetic.hpp"
#include "oracles.hpp"

namespace hydrolstm {
namespace {

TEST(Tsoi, JumpNearTheEnd) {
    std::vector<double> s(365, 0.1);
    for (std::size_t t = 360; t < 365; ++t) s[t] = 0.11;  // 1-based steps 361..365
    EXPECT_EQ(tsoi(s), 5u);
}

TEST(Tsoi, NoJumpIsZero) {
    EXPECT_EQ(tsoi(std::vector<double>(365, 0.0)), 0u);
    EXPECT_EQ(tsoi(std::vector<double>{}), 0u);
    EXPECT_EQ(tsoi(std::vector<double>{0.5}), 0u);
}

TEST(Tsoi, EarliestJump) {
    std::vector<double> s(365, 0.0);
    s[1] = 1.0;
    EXPECT_EQ(tsoi(s), 364u);
}

TEST(Tsoi, ThresholdIsStrict) {
    std::vector<double> s(10, 0.0);
    s[9] = 2e-3;
    EXPECT_EQ(tsoi(s, 2e-3), 0u);
    s[9] = 2.5e-3;
    EXPECT_EQ(tsoi(s, 2e-3), 1u);
}

TEST(Tsoi, MonotoneInThreshold) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> s(120);
        for (std::size_t t = 0; t < s.size(); ++t) s[t] = std::exp(0.05 * static_cast<double>(t) - 6.0) * n(rng);
        std::size_t prev = tsoi(s, 0.0);
        for (double thr : {1e-5, 1e-4, 1e-3, 2e-3, 1e-2, 0.1, 1.0, 1e9}) {
            const std::size_t cur = tsoi(s, thr);
            EXPECT_LE(cur, prev);
            prev = cur;
        }
        EXPECT_EQ(tsoi(s, 1e9), 0u);
    }
}

TEST(TsoiSeries, BlindModelIgnoresInputs) {
    const auto p = constructed_blind_model(3);
    const auto series = test::random_matrix(4, 140, 5);
    const auto samples = test::samples_from(series, {}, 100);
    const auto results = tsoi_series(p, samples, kDefaultTsoiThreshold, 50);
    ASSERT_EQ(results.size(), samples.size());
    for (const auto& r : results) EXPECT_EQ(r.tsoi, 0u);
}

TEST(TsoiSeries, ConstructedMemoryModelRespectsHorizon) {
    const std::size_t k = 30;
    const std::size_t seq_len = 120;
    const auto p = constructed_memory_model(k, seq_len);
    const auto series = test::random_matrix(5, 160, 5, 1.5);
    const auto samples = test::samples_from(series, {}, seq_len);
    const auto results = tsoi_series(p, samples, kDefaultTsoiThreshold, 200);
    ASSERT_EQ(results.size(), samples.size());
    std::size_t at_horizon = 0;
    for (const auto& r : results) {
        EXPECT_LE(r.tsoi, k + 2);
        if (r.tsoi + 2 >= k) ++at_horizon;
        EXPECT_EQ(r.day_of_year, day_of_year(r.prediction_date));
    }
    // The model does use the last k days, so most samples see the full horizon.
    EXPECT_GE(at_horizon, results.size() / 2);
}

TEST(ConstructedMemoryModel, OnlyLastKStepsMatter) {
    const std::size_t k = 10;
    const std::size_t seq_len = 40;
    const auto p = constructed_memory_model(k, seq_len);
    const auto x = test::random_matrix(9, seq_len, 5);
    const auto g = grad_wrt_inputs(p, x, Target::output());
    for (std::size_t t = 0; t < seq_len; ++t) {
        const double mag = std::abs(g(t, 0));
        if (t + k < seq_len) EXPECT_LT(mag, 1e-6) << "t=" << t;
        else EXPECT_GT(mag, 1e-3) << "t=" << t;
        for (std::size_t i = 1; i < 5; ++i) EXPECT_LT(std::abs(g(t, i)), 1e-6);
    }
}

TEST(Quantile, LinearInterpolation) {
    EXPECT_EQ(quantile({10, 20, 30}, 0.5), 20.0);
    EXPECT_EQ(quantile({30, 10, 20}, 0.25), 15.0);
    EXPECT_EQ(quantile({1, 2, 3, 4}, 0.5), 2.5);
    EXPECT_EQ(quantile({7}, 0.75), 7.0);
    EXPECT_THROW(quantile({}, 0.5), Error);
}

TEST(DoyQuantiles, GroupsByDayOfYear) {
    std::vector<TsoiResult> r;
    for (int y = 0; y < 3; ++y) {
        const Date d = Date{std::chrono::year{2001 + y} / 3 / 1};
        r.push_back({d, day_of_year(d), static_cast<std::size_t>(10 * (y + 1))});
        const Date e = d + std::chrono::days{1};
        r.push_back({e, day_of_year(e), 5});
    }
    const auto curve = doy_quantiles(r);
    ASSERT_EQ(curve.size(), 2u);
    EXPECT_EQ(curve[0].day_of_year, 60);
    EXPECT_EQ(curve[0].count, 3u);
    EXPECT_EQ(curve[0].q50, 20.0);
    EXPECT_EQ(curve[0].q25, 15.0);
    EXPECT_EQ(curve[0].q75, 25.0);
    EXPECT_EQ(curve[1].q25, 5.0);
    EXPECT_EQ(curve[1].q75, 5.0);
    for (const auto& q : curve) {
        EXPECT_LE(q.q25, q.q50);
        EXPECT_LE(q.q50, q.q75);
    }

    std::ostringstream out;
    write_quantile_csv(out, curve);
    EXPECT_EQ(out.str(), "doy,q25,q50,q75\n60,15,20,25\n61,5,5,5\n");
}

TEST(Pearson, Identities) {
    const std::vector<double> a = {1, 2, 4, 8, 3};
    std::vector<double> neg(a.size()), affine(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        neg[i] = -a[i];
        affine[i] = 3.0 * a[i] + 7.0;
    }
    EXPECT_NEAR(pearson(a, a), 1.0, 1e-15);
    EXPECT_NEAR(pearson(a, neg), -1.0, 1e-15);
    EXPECT_NEAR(pearson(a, affine), 1.0, 1e-15);
    const std::vector<double> flat(5, 2.0);
    try {
        pearson(a, flat);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ConstantSeries);
    }
}

ProxyStateSeries proxy_from_cells(const ModelParams& p, const Matrix& series, std::size_t seq_len,
                                  std::size_t cell, double sign) {
    // Cell trajectory of the first window, used as a proxy state aligned with that window.
    const auto samples = test::samples_from(series, {}, seq_len);
    const Matrix cells = cell_states(p, samples.front());
    ProxyStateSeries proxy;
    proxy.names = {"same"};
    proxy.values = Matrix(seq_len, 1);
    for (std::size_t t = 0; t < seq_len; ++t) {
        proxy.dates.push_back(samples.front().date_of_row(t));
        proxy.values(t, 0) = sign * cells(t, cell);
    }
    return proxy;
}

TEST(CellStateCorrelations, SelfAndNegation) {
    const auto p = init_params(12);
    const auto series = test::random_matrix(13, 50, 5);
    const auto samples = test::samples_from(series, {}, 50);
    for (double sign : {1.0, -1.0}) {
        const auto proxy = proxy_from_cells(p, series, 50, 6, sign);
        const auto report = cell_state_correlations(p, samples, proxy);
        EXPECT_NEAR(report.mean(6, 0), sign, 1e-12);
        EXPECT_TRUE(report.shown(6, 0));
        EXPECT_EQ(report.samples, 1u);
    }
}

TEST(CellStateCorrelations, WhiteNoiseProxyIsUncorrelated) {
    const auto p = init_params(14);
    const auto series = test::random_matrix(15, 365 + 59, 5);
    const auto samples = test::samples_from(series, {}, 365);
    ASSERT_GE(samples.size(), 30u);
    ProxyStateSeries proxy;
    proxy.names = {"noise"};
    const auto noise = test::random_matrix(16, series.rows(), 1);
    proxy.values = noise;
    for (std::size_t t = 0; t < series.rows(); ++t) proxy.dates.push_back(samples.front().date_of_row(0) + std::chrono::days{static_cast<long>(t)});
    const auto report = cell_state_correlations(p, samples, proxy);
    for (std::size_t j = 0; j < 10; ++j) {
        EXPECT_LT(std::abs(report.mean(j, 0)), 0.2) << "cell " << j;
        EXPECT_FALSE(report.shown(j, 0));
    }
}

TEST(CellStateCorrelations, ConstantWindowsAreSkipped) {
    const auto p = constructed_blind_model(1);
    const auto series = test::random_matrix(2, 40, 5);
    const auto samples = test::samples_from(series, {}, 30);
    ProxyStateSeries proxy;
    proxy.names = {"a"};
    proxy.values = test::random_matrix(3, 40, 1);
    for (std::size_t t = 0; t < 40; ++t) proxy.dates.push_back(samples.front().date_of_row(0) + std::chrono::days{static_cast<long>(t)});
    const auto report = cell_state_correlations(p, samples, proxy);
    // Every cell stays at zero: all windows are constant.
    EXPECT_EQ(report.skipped, samples.size() * 10);
    EXPECT_EQ(report.valid_count(0, 0), 0u);
    std::ostringstream out;
    write_correlation_csv(out, report, false);
    EXPECT_EQ(out.str().substr(0, 9), "cell,a\n0,");
}

TEST(CellStateCorrelations, MisalignedProxyRejected) {
    const auto p = init_params(1);
    const auto series = test::random_matrix(2, 40, 5);
    const auto samples = test::samples_from(series, {}, 30);
    ProxyStateSeries proxy;
    proxy.names = {"a"};
    proxy.values = test::random_matrix(3, 20, 1);
    for (std::size_t t = 0; t < 20; ++t) proxy.dates.push_back(samples.front().date_of_row(0) + std::chrono::days{static_cast<long>(t)});
    try {
        cell_state_correlations(p, samples, proxy);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MisalignedDates);
    }
}

TEST(CellStateCorrelations, MaskedMatrixIsSubsetOfFull) {
    const auto p = init_params(21);
    const auto series = test::random_matrix(22, 80, 5);
    const auto samples = test::samples_from(series, {}, 60);
    ProxyStateSeries proxy;
    proxy.names = {"a", "b"};
    proxy.values = Matrix(80, 2);
    for (std::size_t t = 0; t < 80; ++t) {
        proxy.dates.push_back(samples.front().date_of_row(0) + std::chrono::days{static_cast<long>(t)});
        proxy.values(t, 0) = std::sin(0.1 * static_cast<double>(t));
        proxy.values(t, 1) = series(t, 0);
    }
    const auto report = cell_state_correlations(p, samples, proxy);
    std::ostringstream full, masked;
    write_correlation_csv(full, report, false);
    write_correlation_csv(masked, report, true);
    std::istringstream fi(full.str()), mi(masked.str());
    std::string fl, ml;
    while (std::getline(fi, fl) && std::getline(mi, ml)) {
        std::istringstream fs(fl), ms(ml);
        std::string fc, mc;
        while (std::getline(fs, fc, ',') && std::getline(ms, mc, ','))
            if (!mc.empty()) EXPECT_EQ(mc, fc);
    }
}

class SnowCell : public ::testing::Test {
protected:
    void SetUp() override {
        ToyCatchmentConfig cfg;
        cfg.n_days = 3 * 365;
        trace_ = generate(cfg);
        const DayRange all{0, trace_.forcings.size()};
        stats_ = compute_norm_stats(trace_.forcings, trace_.discharge, all);
        params_ = constructed_snow_cell_model(*stats_, 4);
        samples_ = make_samples(trace_.forcings, trace_.discharge, *stats_, 365, all);
    }

    const Sample& winter_sample() const {
        // The window ending 1 April of the second full year contains a whole winter.
        for (const auto& s : samples_)
            if (format_date(s.prediction_date).substr(5) == "04-01") return s;
        return samples_.back();
    }

    ToyTrace trace_;
    std::optional<NormStats> stats_;
    ModelParams params_;
    std::vector<Sample> samples_;
};

TEST_F(SnowCell, InspectionShapesAndAlignment) {
    const auto& s = winter_sample();
    const auto insp = inspect_cell(params_, s, 4, *stats_, 100);
    EXPECT_EQ(insp.attribution.values.rows(), 365u);
    EXPECT_EQ(insp.attribution.values.cols(), 5u);
    EXPECT_EQ(insp.trajectory.size(), 365u);
    EXPECT_EQ(insp.temperatures.rows(), 365u);
    EXPECT_EQ(insp.temperatures.cols(), 2u);
    ASSERT_EQ(insp.dates.size(), 365u);
    EXPECT_EQ(insp.dates.back(), s.prediction_date);
    for (std::size_t t = 0; t < 365; ++t) {
        const auto& rec = trace_.forcings[s.start + t];
        EXPECT_EQ(insp.dates[t], rec.date);
        EXPECT_NEAR(insp.temperatures(t, 0), rec.tmin, 1e-9);
        EXPECT_NEAR(insp.temperatures(t, 1), rec.tmax, 1e-9);
    }
    EXPECT_THROW(inspect_cell(params_, s, 10, *stats_, 10), Error);
}

TEST_F(SnowCell, PrecipitationAndRadiationPushOppositeWays) {
    const auto& s = winter_sample();
    const auto insp = inspect_cell(params_, s, 4, *stats_, 200);
    const auto x = s.inputs();
    const Matrix zero(x.rows(), x.cols());
    const auto dir = influence_direction(insp.attribution, x, zero);
    const std::size_t P = index_of(Forcing::Precip);
    const std::size_t S = index_of(Forcing::Srad);
    std::size_t freezing = 0, opposite = 0;
    double frozen_mass = 0.0, thawed_mass = 0.0;
    for (std::size_t t = 0; t < 365; ++t) {
        EXPECT_GE(dir(t, P), 0.0) << "t=" << t;
        EXPECT_LE(dir(t, S), 0.0) << "t=" << t;
        const double mass = std::abs(insp.attribution.values(t, P));
        if (insp.temperatures(t, 0) < 0.0) {
            ++freezing;
            frozen_mass += mass;
            if (dir(t, P) > 0.0 && dir(t, S) < 0.0) ++opposite;
        } else {
            thawed_mass += mass;
        }
    }
    EXPECT_GE(freezing, 20u);
    EXPECT_EQ(opposite, freezing);
    EXPECT_GT(frozen_mass, 5.0 * thawed_mass);
}

TEST_F(SnowCell, TrajectoryTracksTheSnowStore) {
    const auto& s = winter_sample();
    const auto insp = inspect_cell(params_, s, 4, *stats_, 10);
    std::vector<double> swe(365);
    for (std::size_t t = 0; t < 365; ++t) swe[t] = trace_.snow[s.start + t];
    EXPECT_GT(pearson(insp.trajectory, swe), 0.0);
}

TEST(InfluenceDirection, DividesByDisplacement) {
    AttributionMatrix a;
    a.values = Matrix(1, 3);
    a.values(0, 0) = 2.0;
    a.values(0, 1) = -1.0;
    a.values(0, 2) = 5.0;
    Matrix x(1, 3), b(1, 3);
    x(0, 0) = 4.0;
    x(0, 1) = -0.5;
    const auto d = influence_direction(a, x, b);
    EXPECT_EQ(d(0, 0), 0.5);
    EXPECT_EQ(d(0, 1), 2.0);
    EXPECT_EQ(d(0, 2), 0.0);
}

}  // namespace
}  // namespace hydrolstm
