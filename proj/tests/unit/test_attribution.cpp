#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hydrolstm/attribution.hpp"
#include "hydrolstm/error.hpp"
#include "oracles.hpp"

namespace hydrolstm {
namespace {

TEST(IntegratedGradients, LinearFunctionIsExactForAnyStepCount) {
    const Matrix w = test::random_matrix(1, 12, 5);
    const Matrix x = test::random_matrix(2, 12, 5);
    const Matrix zero(12, 5);
    const GradientField field = [&](ConstMatrixView) { return w; };
    for (std::size_t m : {1u, 2u, 10u, 1000u}) {
        const auto ig = integrated_gradients(field, x, zero, m);
        for (std::size_t i = 0; i < x.size(); ++i)
            EXPECT_NEAR(ig.values()[i], w.values()[i] * x.values()[i], 1e-12) << "m=" << m;
    }
}

TEST(IntegratedGradients, SquareUsesRightEndpointSum) {
    const Matrix x(1, 1, 1.0);
    const Matrix zero(1, 1);
    const GradientField field = [](ConstMatrixView p) { return Matrix(1, 1, 2.0 * p(0, 0)); };
    EXPECT_NEAR(integrated_gradients(field, x, zero, 1000)(0, 0), 1.001, 1e-12);
    EXPECT_NEAR(integrated_gradients(field, x, zero, 1)(0, 0), 2.0, 1e-15);
}

TEST(IntegratedGradients, InputAtBaselineGivesZeros) {
    const auto p = init_params(3);
    const auto x = test::random_matrix(4, 20, 5);
    const Baseline b{x, "input"};
    const auto attr = integrated_gradients(p, x, b, Target::output(), 50);
    for (double v : attr.values.values()) EXPECT_EQ(v, 0.0);
}

TEST(IntegratedGradients, EntriesOnTheBaselineAreExactlyZero) {
    const auto p = init_params(5);
    auto x = test::random_matrix(6, 30, 5);
    for (std::size_t t = 0; t < 30; ++t) x(t, 2) = 0.0;
    const auto attr = integrated_gradients(p, x, Baseline::zeros(30, 5), Target::cell(3), 20);
    for (std::size_t t = 0; t < 30; ++t) EXPECT_EQ(attr.values(t, 2), 0.0);
}

TEST(IntegratedGradients, CompletenessOnLstm) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = init_params(seed);
        const auto x = test::random_matrix(seed + 100, 60, 5);
        const auto b = Baseline::zeros(60, 5);
        for (const Target target : {Target::output(), Target::cell(seed % 10)}) {
            const auto a100 = integrated_gradients(p, x, b, target, 100);
            const auto a1000 = integrated_gradients(p, x, b, target, 1000);
            const double delta = std::abs(a1000.target_at_input - a1000.target_at_baseline);
            EXPECT_LE(a1000.residual, 0.01 * delta) << "seed " << seed << ' ' << target.describe();
            EXPECT_LE(a1000.residual, a100.residual + 1e-9);
            EXPECT_NEAR(completeness_residual(a1000, p, x, b.values, target), a1000.residual, 1e-14);
            EXPECT_EQ(a1000.target_at_input, evaluate_target(p, x, target));
        }
    }
}

TEST(IntegratedGradients, RefinesWithMoreSteps) {
    const auto p = init_params(9);
    const auto x = test::random_matrix(10, 40, 5, 2.0);
    const auto b = Baseline::zeros(40, 5);
    const double r10 = integrated_gradients(p, x, b, Target::output(), 10).residual;
    const double r100 = integrated_gradients(p, x, b, Target::output(), 100).residual;
    const double r1000 = integrated_gradients(p, x, b, Target::output(), 1000).residual;
    EXPECT_LE(r100, r10 + 1e-9);
    EXPECT_LE(r1000, r100 + 1e-9);
}

TEST(IntegratedGradients, Errors) {
    const auto p = init_params(1);
    const auto x = test::random_matrix(1, 10, 5);
    EXPECT_THROW(integrated_gradients(p, x, Baseline::zeros(9, 5), Target::output(), 10), Error);
    EXPECT_THROW(integrated_gradients(p, x, Baseline::zeros(10, 5), Target::output(), 0), Error);
}

TEST(IntegratedGradients, TimestepSumsAndCsv) {
    const auto p = init_params(2);
    const auto x = test::random_matrix(3, 4, 5);
    const auto attr = integrated_gradients(p, x, Baseline::zeros(4, 5), Target::output(), 10);
    const auto sums = timestep_sums(attr);
    ASSERT_EQ(sums.size(), 4u);
    double row0 = 0.0;
    for (std::size_t i = 0; i < 5; ++i) row0 += attr.values(0, i);
    EXPECT_EQ(sums[0], row0);

    std::ostringstream out;
    write_attribution_csv(out, attr, parse_date("2001-12-30"));
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,date,precip,srad,tmin,tmax,vp");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("1,2001-12-30,", 0), 0u);
    std::getline(in, line);
    std::getline(in, line);
    EXPECT_EQ(line.rfind("3,2002-01-01,", 0), 0u);
}

}  // namespace
}  // namespace hydrolstm
