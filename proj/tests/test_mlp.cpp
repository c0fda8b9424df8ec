#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spoofdet/errors.hpp"
#include "spoofdet/io_util.hpp"
#include "spoofdet/mlp.hpp"
#include "spoofdet/rng.hpp"
#include "test_util.hpp"

using namespace spoofdet;

namespace {

// Central finite differences of the MAE loss with respect to every
// parameter; the independent oracle for the analytic backward pass.
ParamSet finite_difference_gradients(MlpNetwork net, const std::vector<double>& input,
                                     const std::vector<double>& target, double h) {
    auto loss_at = [&]() {
        const std::vector<double> y = forward(net, input);
        double loss = 0.0;
        for (std::size_t k = 0; k < y.size(); ++k) loss += std::abs(y[k] - target[k]);
        return loss / static_cast<double>(y.size());
    };

    ParamSet grads = ParamSet::zeros_like(net);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
            const double saved = net.weights[l][i];
            net.weights[l][i] = saved + h;
            const double up = loss_at();
            net.weights[l][i] = saved - h;
            const double down = loss_at();
            net.weights[l][i] = saved;
            grads.weights[l][i] = (up - down) / (2.0 * h);
        }
        for (std::size_t i = 0; i < net.biases[l].size(); ++i) {
            const double saved = net.biases[l][i];
            net.biases[l][i] = saved + h;
            const double up = loss_at();
            net.biases[l][i] = saved - h;
            const double down = loss_at();
            net.biases[l][i] = saved;
            grads.biases[l][i] = (up - down) / (2.0 * h);
        }
    }
    return grads;
}

// Smallest |pre-activation| and |output residual|; gradcheck samples
// whose margin is below `tol` sit near a kink and are resampled.
double kink_margin(const MlpNetwork& net, const std::vector<double>& input,
                   const std::vector<double>& target) {
    MlpWorkspace ws;
    forward_into(net, input.data(), ws);
    double margin = 1e300;
    for (std::size_t l = 0; l + 1 < net.layer_count(); ++l) {
        for (double z : ws.preactivations[l]) margin = std::min(margin, std::abs(z));
    }
    const auto& y = ws.activations.back();
    for (std::size_t k = 0; k < y.size(); ++k) {
        margin = std::min(margin, std::abs(y[k] - target[k]));
    }
    return margin;
}

double max_relative_error(const ParamSet& a, const ParamSet& b) {
    double worst = 0.0;
    auto scan = [&](const std::vector<double>& ga, const std::vector<double>& gb) {
        for (std::size_t i = 0; i < ga.size(); ++i) {
            const double denom = std::max({std::abs(ga[i]), std::abs(gb[i]), 1e-8});
            worst = std::max(worst, std::abs(ga[i] - gb[i]) / denom);
        }
    };
    for (std::size_t l = 0; l < a.weights.size(); ++l) {
        scan(a.weights[l], b.weights[l]);
        scan(a.biases[l], b.biases[l]);
    }
    return worst;
}

} // namespace

TEST_CASE("parameter counts for the two production shapes") {
    const MlpNetwork predictor = init_network({4, 16, 8, 4, 1}, 1);
    CHECK(predictor.parameter_count() == 257);

    const MlpNetwork qnet = init_network({1, 24, 24, 3}, 1);
    CHECK(qnet.parameter_count() == 723);
}

TEST_CASE("initialization is deterministic and within the Glorot bound") {
    const MlpNetwork a = init_network({4, 16, 8, 4, 1}, 42);
    const MlpNetwork b = init_network({4, 16, 8, 4, 1}, 42);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);

    const MlpNetwork c = init_network({4, 16, 8, 4, 1}, 43);
    CHECK(a.weights != c.weights);

    const double limit0 = std::sqrt(6.0 / (4 + 16));
    for (double w : a.weights[0]) {
        CHECK(std::abs(w) <= limit0);
    }
    for (const auto& layer : a.biases) {
        for (double b_v : layer) CHECK(b_v == 0.0);
    }
}

TEST_CASE("invalid layer specs are rejected") {
    CHECK_THROWS_AS(init_network({4}, 1), ValidationError);
    CHECK_THROWS_AS(init_network({4, 0, 1}, 1), ValidationError);
    CHECK_THROWS_AS(init_network({-1, 2}, 1), ValidationError);
}

TEST_CASE("forward: zero parameters give zero output") {
    MlpNetwork net = init_network({3, 5, 2}, 1);
    for (auto& w : net.weights) std::fill(w.begin(), w.end(), 0.0);
    const auto y = forward(net, {1.0, -2.0, 3.0});
    CHECK(y == std::vector<double>{0.0, 0.0});
}

TEST_CASE("forward: single layer pair is affine") {
    MlpNetwork net = init_network({1, 1}, 1);
    net.weights[0][0] = 2.5;
    net.biases[0][0] = -0.75;
    CHECK(forward(net, {3.0})[0] == doctest::Approx(2.5 * 3.0 - 0.75).epsilon(1e-15));
}

TEST_CASE("forward: negative hidden pre-activation is gated off") {
    MlpNetwork net = init_network({1, 1, 1}, 1);
    net.weights[0][0] = 1.0;
    net.biases[0][0] = 0.0;
    net.weights[1][0] = 5.0;
    net.biases[1][0] = 0.0;
    CHECK(forward(net, {-3.0})[0] == 0.0); // hidden z = -3 contributes nothing
    CHECK(forward(net, {2.0})[0] == 10.0);
}

TEST_CASE("forward rejects shape mismatches") {
    const MlpNetwork net = init_network({3, 2}, 1);
    CHECK_THROWS_AS(forward(net, {1.0, 2.0}), ValidationError);
}

TEST_CASE("gradients: exact hit gives all zeros under the kink convention") {
    MlpNetwork net = init_network({2, 3, 1}, 7);
    const std::vector<double> input{0.5, -0.25};
    const std::vector<double> target = forward(net, input);
    ParamSet grads;
    const double loss = gradients_mae(net, input, target, grads);
    CHECK(loss == 0.0);
    for (const auto& g : grads.weights) {
        for (double v : g) CHECK(v == 0.0);
    }
}

TEST_CASE("gradients: sign of the MAE derivative on a scalar affine net") {
    MlpNetwork net = init_network({1, 1}, 1);
    net.weights[0][0] = 1.0;
    net.biases[0][0] = 0.0;
    // y = w * x with x = 2; target below y so d|y-t|/dw = +x = +2
    ParamSet grads;
    gradients_mae(net, {2.0}, {1.0}, grads);
    CHECK(grads.weights[0][0] == 2.0);
    CHECK(grads.biases[0][0] == 1.0);
}

TEST_CASE("gradients reject non-finite input") {
    const MlpNetwork net = init_network({1, 1}, 1);
    ParamSet grads;
    CHECK_THROWS_AS(gradients_mae(net, {std::nan("")}, {0.0}, grads), ValidationError);
}

TEST_CASE("gradient check against central finite differences") {
    Rng rng(2024);
    int checked = 0;
    int attempts = 0;
    while (checked < 12 && attempts < 200) {
        ++attempts;
        const MlpNetwork net = init_network({4, 6, 3, 1}, rng.next_u64());
        std::vector<double> input(4);
        for (double& v : input) v = rng.uniform(-2.0, 2.0);
        const std::vector<double> target{rng.uniform(-2.0, 2.0)};
        if (kink_margin(net, input, target) < 1e-3) continue;

        ParamSet analytic;
        gradients_mae(net, input, target, analytic);
        const ParamSet numeric = finite_difference_gradients(net, input, target, 1e-6);
        CHECK(max_relative_error(analytic, numeric) < 1e-4);
        ++checked;
    }
    CHECK(checked == 12);
}

TEST_CASE("ADAM: zero gradient leaves parameters unchanged, advances t") {
    MlpNetwork net = init_network({2, 2}, 5);
    const MlpNetwork before = net;
    AdamState state = AdamState::init(net);
    ParamSet grads = ParamSet::zeros_like(net);
    adam_step(net, grads, state);
    CHECK(state.step == 1);
    CHECK(net.weights == before.weights);
    CHECK(net.biases == before.biases);
}

TEST_CASE("ADAM: bias-corrected first step is close to -lr * sign(g)") {
    MlpNetwork net = init_network({1, 1}, 5);
    net.weights[0][0] = 0.0;
    AdamState state = AdamState::init(net);
    ParamSet grads = ParamSet::zeros_like(net);
    grads.weights[0][0] = 0.37; // any nonzero gradient
    adam_step(net, grads, state);
    CHECK(net.weights[0][0] == doctest::Approx(-1e-3).epsilon(1e-6));
}

TEST_CASE("ADAM: two steps with g = 1 match the hand-computed recurrence") {
    MlpNetwork net = init_network({1, 1}, 5);
    net.weights[0][0] = 0.0;
    net.biases[0][0] = 0.0;
    AdamState state = AdamState::init(net);
    ParamSet grads = ParamSet::zeros_like(net);
    grads.weights[0][0] = 1.0;

    // scalar recurrence with the default hyperparameters
    const double lr = 1e-3, b1 = 0.9, b2 = 0.999, eps = 1e-8;
    double m = 0.0, v = 0.0, theta = 0.0;
    for (int t = 1; t <= 2; ++t) {
        m = b1 * m + (1.0 - b1) * 1.0;
        v = b2 * v + (1.0 - b2) * 1.0;
        const double m_hat = m / (1.0 - std::pow(b1, t));
        const double v_hat = v / (1.0 - std::pow(b2, t));
        theta -= lr * m_hat / (std::sqrt(v_hat) + eps);

        adam_step(net, grads, state);
        CHECK(std::abs(net.weights[0][0] - theta) < 1e-10);
    }
}

TEST_CASE("training drives a constant-target dataset below 1e-3 MAE") {
    Rng rng(31);
    MlpDataset data;
    for (int i = 0; i < 64; ++i) {
        data.add_row({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)}, {0.6});
    }
    MlpNetwork net = init_network({2, 8, 1}, 11);
    TrainConfig cfg;
    cfg.epochs = 1000;
    cfg.batch_size = 32;
    cfg.rng_seed = 11;
    const auto history = train(net, data, cfg);
    REQUIRE(history.size() == 1000);
    CHECK(history.back() < 1e-3);
}

TEST_CASE("training is deterministic under the seed") {
    Rng rng(37);
    MlpDataset data;
    for (int i = 0; i < 50; ++i) {
        const double x = rng.uniform(-1.0, 1.0);
        data.add_row({x}, {0.5 * x + 0.1});
    }
    TrainConfig cfg;
    cfg.epochs = 40;
    cfg.rng_seed = 4;

    MlpNetwork a = init_network({1, 4, 1}, 2);
    MlpNetwork b = init_network({1, 4, 1}, 2);
    const auto ha = train(a, data, cfg);
    const auto hb = train(b, data, cfg);
    CHECK(ha == hb);
    CHECK(a.weights == b.weights);
}

TEST_CASE("training with learning rate 0 leaves parameters bit-identical") {
    MlpDataset data;
    data.add_row({1.0}, {2.0});
    data.add_row({2.0}, {3.0});
    MlpNetwork net = init_network({1, 3, 1}, 6);
    const MlpNetwork before = net;
    TrainConfig cfg;
    cfg.epochs = 10;
    cfg.learning_rate = 0.0;
    train(net, data, cfg);
    CHECK(net.weights == before.weights);
    CHECK(net.biases == before.biases);
}

TEST_CASE("forward is positively homogeneous with zero biases") {
    Rng rng(41);
    MlpNetwork net = init_network({3, 6, 4, 2}, 13); // biases start at zero
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(3);
        for (double& v : x) v = rng.uniform(-2.0, 2.0);
        const double c = rng.uniform(0.1, 5.0);
        std::vector<double> cx(3);
        for (std::size_t i = 0; i < 3; ++i) cx[i] = c * x[i];
        const auto y = forward(net, x);
        const auto yc = forward(net, cx);
        for (std::size_t k = 0; k < y.size(); ++k) {
            CHECK(yc[k] == doctest::Approx(c * y[k]).epsilon(1e-12));
        }
    }
}

TEST_CASE("model file round-trips exactly") {
    const MlpNetwork net = init_network({4, 16, 8, 4, 1}, 3);
    NormalizationStats stats;
    stats.features = {{"speed_fps", 0.0, 100.0},
                      {"steer_deg", -700.0, 700.0},
                      {"pedal_pct", 0.0, 100.0},
                      {"prev_distance_m", 0.0, 0.31}};

    testutil::TempDir dir("mlp_model");
    save_model(net, stats, "predictor", dir.file("model.json"));
    const LoadedModel loaded = load_model(dir.file("model.json"));

    CHECK(loaded.role == "predictor");
    CHECK(loaded.net.layer_sizes == net.layer_sizes);
    CHECK(loaded.net.weights == net.weights);
    CHECK(loaded.net.biases == net.biases);
    REQUIRE(loaded.stats.dim() == 4);
    CHECK(loaded.stats.features[3].max == 0.31);

    Rng rng(19);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x(4);
        for (double& v : x) v = rng.uniform(-1.0, 2.0);
        CHECK(forward(net, x) == forward(loaded.net, x));
    }
}

TEST_CASE("malformed model files are rejected") {
    testutil::TempDir dir("mlp_badmodel");
    const MlpNetwork net = init_network({2, 3, 1}, 3);
    save_model(net, NormalizationStats{}, "predictor", dir.file("model.json"));

    // truncated file
    {
        std::string text = read_file(dir.file("model.json"));
        text.resize(text.size() / 2);
        atomic_write_file(dir.file("truncated.json"), text);
        CHECK_THROWS_AS(load_model(dir.file("truncated.json")), ParseError);
    }

    // layer_sizes disagreeing with the matrices
    {
        std::string text = read_file(dir.file("model.json"));
        const auto pos = text.find("[\n    2,");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 8, "[\n    9,");
        atomic_write_file(dir.file("mismatch.json"), text);
        CHECK_THROWS_AS(load_model(dir.file("mismatch.json")), ParseError);
    }
}
