#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "hydrolstm/checkpoint.hpp"
#include "hydrolstm/error.hpp"
#include "hydrolstm/lstm.hpp"
#include "oracles.hpp"

namespace hydrolstm {
namespace {

TEST(InitParams, DeterministicAndBounded) {
    const auto a = init_params(42);
    const auto b = init_params(42);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, init_params(43));
    EXPECT_EQ(a.size(), 651u);
    EXPECT_EQ(ModelShape{}.parameter_count(), 4u * (10 * 5 + 10 * 10 + 10) + 10 + 1);

    const ModelShape shape;
    const double gate_bound = gate_init_bound(shape);
    for (std::size_t i = 0; i < a.b_offset(); ++i) EXPECT_LE(std::abs(a.values()[i]), gate_bound);
    for (std::size_t j = 0; j < shape.hidden; ++j) {
        EXPECT_LE(std::abs(a.dense_weight(j)), dense_init_bound(shape));
        EXPECT_EQ(a.bias(Gate::Input, j), 0.0);
        EXPECT_EQ(a.bias(Gate::Forget, j), 1.0);
        EXPECT_EQ(a.bias(Gate::Cell, j), 0.0);
        EXPECT_EQ(a.bias(Gate::Output, j), 0.0);
    }
    EXPECT_EQ(a.dense_bias(), 0.0);
}

TEST(LstmStep, ZeroParamsGiveZeroState) {
    const ModelParams p(ModelShape{});
    const std::vector<double> x = {3.0, -1.0, 0.5, 2.0, -7.0};
    const auto r = lstm_step(x, CellState::zeros(10), p);
    for (std::size_t j = 0; j < 10; ++j) {
        EXPECT_EQ(r.state.c[j], 0.0);
        EXPECT_EQ(r.state.h[j], 0.0);
        EXPECT_EQ(r.gates.input[j], 0.5);
    }
}

TEST(LstmStep, SaturatedGatesHoldTheCell) {
    ModelParams p = init_params(5);
    for (std::size_t j = 0; j < 10; ++j) {
        p.bias(Gate::Forget, j) = 100.0;
        p.bias(Gate::Input, j) = -100.0;
    }
    CellState prev = CellState::zeros(10);
    for (std::size_t j = 0; j < 10; ++j) {
        prev.c[j] = 0.3 * static_cast<double>(j) - 1.0;
        prev.h[j] = 0.05 * static_cast<double>(j);
    }
    const std::vector<double> x = {0.2, -0.4, 1.0, 0.0, 0.3};
    const auto r = lstm_step(x, prev, p);
    for (std::size_t j = 0; j < 10; ++j) EXPECT_NEAR(r.state.c[j], prev.c[j], 1e-12);
}

TEST(LstmStep, ScalarHandComputedCase) {
    ModelParams p(ModelShape{1, 1});
    for (const Gate g : kGates) {
        p.w(g, 0, 0) = 1.0;
        p.u(g, 0, 0) = 1.0;
    }
    const std::vector<double> x = {1.0};
    const auto r = lstm_step(x, CellState::zeros(1), p);
    // sigma(1) * tanh(1)
    EXPECT_NEAR(r.state.c[0], 0.5567699411459397, 1e-15);
    EXPECT_NEAR(r.state.h[0], (1.0 / (1.0 + std::exp(-1.0))) * std::tanh(0.5567699411459397), 1e-15);
}

TEST(Forward, ZeroParamsPredictZero) {
    const ModelParams p(ModelShape{});
    const auto x = test::random_matrix(1, 365, 5);
    EXPECT_EQ(forward(x, p).prediction(), 0.0);
}

TEST(Forward, OrderSensitive) {
    const auto p = init_params(3);
    auto x = test::random_matrix(2, 365, 5);
    const double y = forward(x, p).prediction();
    for (std::size_t i = 0; i < 5; ++i) std::swap(x(360, i), x(200, i));
    EXPECT_NE(forward(x, p).prediction(), y);
}

TEST(Forward, TraceIsConsistentAndBounded) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = init_params(seed);
        const auto x = test::random_matrix(seed + 50, 365, 5);
        const auto trace = forward(x, p);
        ASSERT_EQ(trace.seq_len(), 365u);
        for (std::size_t t = 0; t < trace.seq_len(); ++t) {
            for (std::size_t j = 0; j < 10; ++j) {
                const double i = trace.gate(t, Gate::Input, j);
                const double f = trace.gate(t, Gate::Forget, j);
                const double g = trace.gate(t, Gate::Cell, j);
                const double o = trace.gate(t, Gate::Output, j);
                EXPECT_NEAR(trace.cells()(t, j), f * trace.prev_cell(t, j) + i * g, 1e-15);
                EXPECT_GT(i, 0.0);
                EXPECT_LT(i, 1.0);
                EXPECT_GT(f, 0.0);
                EXPECT_LT(f, 1.0);
                EXPECT_GT(o, 0.0);
                EXPECT_LT(o, 1.0);
                EXPECT_GT(g, -1.0);
                EXPECT_LT(g, 1.0);
                EXPECT_LT(std::abs(trace.hiddens()(t, j)), 1.0);
            }
        }
        double y = p.dense_bias();
        for (std::size_t j = 0; j < 10; ++j) y += p.dense_weight(j) * trace.hiddens()(364, j);
        EXPECT_EQ(trace.prediction(), y);
        EXPECT_EQ(predict(x, p), trace.prediction());
    }
}

TEST(Forward, DeterministicBitIdentical) {
    const auto p = init_params(11);
    const auto x = test::random_matrix(12, 365, 5);
    const auto a = forward(x, p);
    const auto b = forward(x, p);
    EXPECT_EQ(a.cells(), b.cells());
    EXPECT_EQ(a.hiddens(), b.hiddens());
    EXPECT_EQ(a.gates(), b.gates());
    EXPECT_EQ(a.prediction(), b.prediction());
}

TEST(Forward, ShutInputGateKeepsZeroCell) {
    ModelParams p = init_params(8);
    for (std::size_t j = 0; j < 10; ++j) {
        for (std::size_t i = 0; i < 5; ++i) p.w(Gate::Input, j, i) = 0.0;
        for (std::size_t h = 0; h < 10; ++h) p.u(Gate::Input, j, h) = 0.0;
        p.bias(Gate::Input, j) = -800.0;
        p.bias(Gate::Forget, j) = 800.0;
    }
    p.dense_bias() = 0.37;
    const auto trace = forward(test::random_matrix(9, 365, 5), p);
    for (std::size_t j = 0; j < 10; ++j) EXPECT_EQ(trace.cells()(364, j), 0.0);
    EXPECT_EQ(trace.prediction(), 0.37);
}

TEST(Forward, NonFiniteStateNamesTimestep) {
    const auto p = init_params(1);
    auto x = test::random_matrix(2, 20, 5);
    x(6, 2) = std::numeric_limits<double>::quiet_NaN();
    try {
        forward(x, p);
        FAIL() << "expected NonFiniteState";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFiniteState);
        EXPECT_NE(std::string(e.what()).find("timestep 7"), std::string::npos) << e.what();
    }
}

TEST(Forward, ShapeMismatch) {
    const auto p = init_params(1);
    try {
        forward(test::random_matrix(2, 20, 4), p);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
    }
}

TEST(Checkpoint, RoundTripIsExact) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Checkpoint cp{init_params(seed, {5, 3 + seed}), {{"seq_len", "365"}, {"norm.precip.mean", "2.5"}}};
        cp.params.values()[7] = 1.0 / 3.0;
        std::stringstream ss;
        write_checkpoint(ss, cp);
        const auto back = read_checkpoint(ss);
        EXPECT_EQ(back.params, cp.params);
        EXPECT_EQ(back.metadata, cp.metadata);
        std::stringstream again;
        write_checkpoint(again, back);
        std::stringstream first;
        write_checkpoint(first, cp);
        EXPECT_EQ(again.str(), first.str());
    }
}

TEST(Checkpoint, RejectsCorruption) {
    std::stringstream ss;
    write_checkpoint(ss, Checkpoint{init_params(1), {}});
    std::string text = ss.str();
    auto expect_checkpoint_error = [](const std::string& body) {
        std::istringstream in(body);
        try {
            read_checkpoint(in);
            ADD_FAILURE() << "expected a Checkpoint error";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::Checkpoint);
        }
    };
    std::string wrong_version = text;
    wrong_version.replace(wrong_version.find(" 1\n"), 3, " 9\n");
    expect_checkpoint_error(wrong_version);
    expect_checkpoint_error(text.substr(0, text.size() / 2));
    std::string bad_dims = text;
    bad_dims.replace(bad_dims.find("tensor W_f 10 5"), 15, "tensor W_f 10 6");
    expect_checkpoint_error(bad_dims);
}

}  // namespace
}  // namespace hydrolstm
