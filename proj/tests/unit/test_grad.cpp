#include <gtest/gtest.h>

#include <cmath>

#include "hydrolstm/error.hpp"
#include "hydrolstm/grad.hpp"
#include "oracles.hpp"

namespace hydrolstm {
namespace {

void expect_matches_fd(const Matrix& analytic, const Matrix& numeric) {
    ASSERT_EQ(analytic.rows(), numeric.rows());
    ASSERT_EQ(analytic.cols(), numeric.cols());
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        EXPECT_TRUE(test::close(analytic.values()[i], numeric.values()[i]))
            << "entry " << i << ": bptt " << analytic.values()[i] << " vs fd " << numeric.values()[i];
    }
}

TEST(GradWrtInputs, ZeroParamsZeroGradient) {
    const ModelParams p(ModelShape{});
    const auto g = grad_wrt_inputs(p, test::random_matrix(1, 365, 5), Target::output());
    for (double v : g.values()) EXPECT_EQ(v, 0.0);
}

TEST(GradWrtInputs, OutputTargetMatchesFiniteDifferences) {
    const auto p = init_params(17);
    const auto x = test::random_matrix(18, 40, 5);
    expect_matches_fd(grad_wrt_inputs(p, x, Target::output()), test::fd_input_gradient(p, x, Target::output()));
}

TEST(GradWrtInputs, FullLengthWindowMatchesFiniteDifferences) {
    const auto p = init_params(4);
    const auto x = test::random_matrix(5, 365, 5);
    expect_matches_fd(grad_wrt_inputs(p, x, Target::output()), test::fd_input_gradient(p, x, Target::output()));
}

TEST(GradWrtInputs, CellTargetsMatchFiniteDifferences) {
    const auto p = init_params(23);
    const auto x = test::random_matrix(24, 30, 5);
    for (std::size_t j = 0; j < 10; ++j)
        expect_matches_fd(grad_wrt_inputs(p, x, Target::cell(j)), test::fd_input_gradient(p, x, Target::cell(j)));
}

TEST(GradWrtInputs, CellIndexOutOfRange) {
    const auto p = init_params(1);
    try {
        grad_wrt_inputs(p, test::random_matrix(1, 5, 5), Target::cell(10));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}

TEST(GradWrtInputs, ClosedForgetGatesLocaliseGradient) {
    ModelParams p = init_params(31);
    for (std::size_t j = 0; j < 10; ++j) {
        p.bias(Gate::Forget, j) = -40.0;
        for (std::size_t i = 0; i < 5; ++i) p.w(Gate::Forget, j, i) = 0.0;
        for (const Gate g : kGates)
            for (std::size_t h = 0; h < 10; ++h) p.u(g, j, h) = 0.0;
    }
    const Matrix x(365, 5);
    const auto g = grad_wrt_inputs(p, x, Target::output());
    for (std::size_t t = 0; t + 1 < 365; ++t)
        for (std::size_t i = 0; i < 5; ++i) EXPECT_LT(std::abs(g(t, i)), 1e-12) << "t=" << t;
    double last = 0.0;
    for (std::size_t i = 0; i < 5; ++i) last += std::abs(g(364, i));
    EXPECT_GT(last, 1e-6);
}

TEST(GradWrtParams, MatchesFiniteDifferencesOnTinyModel) {
    const ModelShape shape{5, 2};
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = init_params(seed, shape);
        std::vector<Matrix> inputs;
        std::vector<double> targets;
        for (std::size_t k = 0; k < 3; ++k) {
            inputs.push_back(test::random_matrix(seed * 10 + k, 10, 5));
            targets.push_back(0.3 * static_cast<double>(k) - 0.2);
        }
        // A batch of three explicit windows.
        std::vector<Sample> batch;
        for (std::size_t k = 0; k < 3; ++k) {
            Sample s;
            s.series = std::make_shared<const Matrix>(inputs[k]);
            s.start = 0;
            s.seq_len = 10;
            s.target = targets[k];
            batch.push_back(s);
        }
        const auto analytic = grad_wrt_params(p, batch);
        const auto numeric = test::fd_param_gradient(p, inputs, targets);
        EXPECT_NEAR(analytic.loss, test::batch_loss(p, inputs, targets), 1e-14);
        for (std::size_t i = 0; i < numeric.size(); ++i)
            EXPECT_TRUE(test::close(analytic.gradient.values()[i], numeric[i]))
                << "seed " << seed << " param " << i << ": " << analytic.gradient.values()[i] << " vs " << numeric[i];
    }
}

TEST(GradWrtParams, PerfectPredictionsGiveZeroGradient) {
    const auto p = init_params(2);
    const auto series = test::random_matrix(3, 60, 5);
    std::vector<double> targets(60);
    auto samples = test::samples_from(series, targets, 30);
    for (auto& s : samples) s.target = predict(s.inputs(), p);
    const auto g = grad_wrt_params(p, samples);
    EXPECT_EQ(g.loss, 0.0);
    for (double v : g.gradient.values()) EXPECT_EQ(v, 0.0);
}

TEST(GradWrtParams, BatchIsMeanOfPerSample) {
    const auto p = init_params(6);
    const auto series = test::random_matrix(7, 80, 5);
    std::vector<double> targets(80);
    for (std::size_t i = 0; i < targets.size(); ++i) targets[i] = std::sin(0.1 * static_cast<double>(i));
    const auto samples = test::samples_from(series, targets, 25);
    const auto batch = grad_wrt_params(p, samples);
    std::vector<double> mean(p.size(), 0.0);
    for (const auto& s : samples) {
        const auto g = sample_param_gradient(p, s.inputs(), *s.target);
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += g.gradient.values()[i];
    }
    for (auto& v : mean) v /= static_cast<double>(samples.size());
    for (std::size_t i = 0; i < mean.size(); ++i)
        EXPECT_NEAR(batch.gradient.values()[i], mean[i], 1e-12 * std::max(1.0, std::abs(mean[i])));
}

TEST(GradWrtParams, EmptyBatchRejected) {
    const auto p = init_params(1);
    try {
        grad_wrt_params(p, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}

}  // namespace
}  // namespace hydrolstm
