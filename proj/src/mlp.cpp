#include "spoofdet/mlp.hpp"

#include <cmath>
#include <numeric>

#include <json.hpp>

#include "spoofdet/errors.hpp"
#include "spoofdet/io_util.hpp"
#include "spoofdet/rng.hpp"

namespace spoofdet {

std::size_t MlpNetwork::parameter_count() const {
    std::size_t count = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        count += weights[l].size() + biases[l].size();
    }
    return count;
}

ParamSet ParamSet::zeros_like(const MlpNetwork& net) {
    ParamSet p;
    p.weights.resize(net.weights.size());
    p.biases.resize(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        p.weights[l].assign(net.weights[l].size(), 0.0);
        p.biases[l].assign(net.biases[l].size(), 0.0);
    }
    return p;
}

void ParamSet::fill(double value) {
    for (auto& w : weights) std::fill(w.begin(), w.end(), value);
    for (auto& b : biases) std::fill(b.begin(), b.end(), value);
}

AdamState AdamState::init(const MlpNetwork& net, double learning_rate) {
    AdamState s;
    s.first_moment = ParamSet::zeros_like(net);
    s.second_moment = ParamSet::zeros_like(net);
    s.learning_rate = learning_rate;
    return s;
}

void MlpDataset::add_row(const std::vector<double>& input, const std::vector<double>& target) {
    if (input_dim == 0 && target_dim == 0) {
        input_dim = input.size();
        target_dim = target.size();
    }
    if (input.size() != input_dim || target.size() != target_dim) {
        throw ValidationError("dataset row width mismatch");
    }
    inputs.insert(inputs.end(), input.begin(), input.end());
    targets.insert(targets.end(), target.begin(), target.end());
}

MlpNetwork init_network(const std::vector<int>& layer_sizes, std::uint64_t rng_seed) {
    if (layer_sizes.size() < 2) {
        throw ValidationError("network needs at least an input and an output layer");
    }
    for (int s : layer_sizes) {
        if (s <= 0) throw ValidationError("layer sizes must be positive");
    }

    MlpNetwork net;
    net.layer_sizes = layer_sizes;
    Rng rng(rng_seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
        for (double& v : w) v = rng.uniform(-limit, limit);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(static_cast<std::size_t>(fan_out), 0.0);
    }
    return net;
}

static void prepare_workspace(const MlpNetwork& net, MlpWorkspace& ws) {
    const std::size_t layers = net.layer_count();
    if (ws.activations.size() == layers + 1) return;
    ws.activations.resize(layers + 1);
    ws.preactivations.resize(layers);
    ws.deltas.resize(layers);
    ws.activations[0].resize(net.layer_sizes[0]);
    for (std::size_t l = 0; l < layers; ++l) {
        ws.activations[l + 1].resize(net.layer_sizes[l + 1]);
        ws.preactivations[l].resize(net.layer_sizes[l + 1]);
        ws.deltas[l].resize(net.layer_sizes[l + 1]);
    }
}

void forward_into(const MlpNetwork& net, const double* input, MlpWorkspace& ws) {
    prepare_workspace(net, ws);
    const std::size_t layers = net.layer_count();
    std::copy(input, input + net.layer_sizes[0], ws.activations[0].begin());

    for (std::size_t l = 0; l < layers; ++l) {
        const int fan_in = net.layer_sizes[l];
        const int fan_out = net.layer_sizes[l + 1];
        const double* w = net.weights[l].data();
        const double* b = net.biases[l].data();
        const double* x = ws.activations[l].data();
        double* z = ws.preactivations[l].data();
        double* a = ws.activations[l + 1].data();

        for (int j = 0; j < fan_out; ++j) z[j] = b[j];
        for (int i = 0; i < fan_in; ++i) {
            const double xi = x[i];
            const double* wrow = w + static_cast<std::size_t>(i) * fan_out;
            for (int j = 0; j < fan_out; ++j) z[j] += xi * wrow[j];
        }
        const bool hidden = l + 1 < layers;
        for (int j = 0; j < fan_out; ++j) {
            a[j] = hidden && z[j] < 0.0 ? 0.0 : z[j];
        }
    }
}

std::vector<double> forward(const MlpNetwork& net, const std::vector<double>& input) {
    if (static_cast<int>(input.size()) != net.layer_sizes.front()) {
        throw ValidationError("forward: input length does not match first layer");
    }
    MlpWorkspace ws;
    forward_into(net, input.data(), ws);
    return ws.activations.back();
}

double accumulate_gradients_mae(const MlpNetwork& net, const double* input,
                                const double* target, ParamSet& grads, MlpWorkspace& ws) {
    forward_into(net, input, ws);
    const std::size_t layers = net.layer_count();
    const int out_dim = net.layer_sizes.back();
    const std::vector<double>& y = ws.activations[layers];

    double loss = 0.0;
    std::vector<double>& delta_out = ws.deltas[layers - 1];
    for (int k = 0; k < out_dim; ++k) {
        const double err = y[k] - target[k];
        loss += std::abs(err);
        // subgradient 0 exactly at the kink
        delta_out[k] = err > 0.0 ? 1.0 : (err < 0.0 ? -1.0 : 0.0);
        delta_out[k] /= out_dim;
    }
    loss /= out_dim;

    for (std::size_t l = layers; l-- > 0;) {
        const int fan_in = net.layer_sizes[l];
        const int fan_out = net.layer_sizes[l + 1];
        const double* x = ws.activations[l].data();
        const double* delta = ws.deltas[l].data();
        double* gw = grads.weights[l].data();
        double* gb = grads.biases[l].data();

        for (int j = 0; j < fan_out; ++j) gb[j] += delta[j];
        for (int i = 0; i < fan_in; ++i) {
            const double xi = x[i];
            double* grow = gw + static_cast<std::size_t>(i) * fan_out;
            for (int j = 0; j < fan_out; ++j) grow[j] += xi * delta[j];
        }

        if (l > 0) {
            const double* w = net.weights[l].data();
            const double* z_prev = ws.preactivations[l - 1].data();
            double* delta_prev = ws.deltas[l - 1].data();
            for (int i = 0; i < fan_in; ++i) {
                double acc = 0.0;
                const double* wrow = w + static_cast<std::size_t>(i) * fan_out;
                for (int j = 0; j < fan_out; ++j) acc += wrow[j] * delta[j];
                // ReLU derivative, 0 at the kink
                delta_prev[i] = z_prev[i] > 0.0 ? acc : 0.0;
            }
        }
    }
    return loss;
}

double gradients_mae(const MlpNetwork& net, const std::vector<double>& input,
                     const std::vector<double>& target, ParamSet& grads) {
    if (static_cast<int>(input.size()) != net.layer_sizes.front()) {
        throw ValidationError("gradients_mae: input length does not match first layer");
    }
    if (static_cast<int>(target.size()) != net.layer_sizes.back()) {
        throw ValidationError("gradients_mae: target length does not match output layer");
    }
    for (double v : input) {
        if (!std::isfinite(v)) throw ValidationError("gradients_mae: non-finite input");
    }
    for (double v : target) {
        if (!std::isfinite(v)) throw ValidationError("gradients_mae: non-finite target");
    }
    grads = ParamSet::zeros_like(net);
    MlpWorkspace ws;
    return accumulate_gradients_mae(net, input.data(), target.data(), grads, ws);
}

void adam_step(MlpNetwork& net, const ParamSet& grads, AdamState& state) {
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

    auto update = [&](std::vector<double>& params, const std::vector<double>& g,
                      std::vector<double>& m, std::vector<double>& v) {
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
            v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
        }
    };

    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        update(net.weights[l], grads.weights[l], state.first_moment.weights[l],
               state.second_moment.weights[l]);
        update(net.biases[l], grads.biases[l], state.first_moment.biases[l],
               state.second_moment.biases[l]);
    }
}

std::vector<double> train(MlpNetwork& net, const MlpDataset& data, const TrainConfig& cfg) {
    if (data.size() == 0) throw ValidationError("train: dataset is empty");
    if (static_cast<int>(data.input_dim) != net.layer_sizes.front() ||
        static_cast<int>(data.target_dim) != net.layer_sizes.back()) {
        throw ValidationError("train: dataset shape does not match network");
    }
    if (cfg.epochs <= 0 || cfg.batch_size <= 0) {
        throw ValidationError("train: epochs and batch size must be positive");
    }

    const std::size_t n = data.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(cfg.rng_seed);

    AdamState adam = AdamState::init(net, cfg.learning_rate);
    ParamSet grads = ParamSet::zeros_like(net);
    MlpWorkspace ws;
    std::vector<double> history;
    history.reserve(cfg.epochs);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t pos = 0;
        while (pos < n) {
            const std::size_t batch_end = std::min(n, pos + static_cast<std::size_t>(cfg.batch_size));
            const double batch_n = static_cast<double>(batch_end - pos);
            grads.fill(0.0);
            for (std::size_t k = pos; k < batch_end; ++k) {
                epoch_loss += accumulate_gradients_mae(net, data.input_row(order[k]),
                                                       data.target_row(order[k]), grads, ws);
            }
            const double scale = 1.0 / batch_n;
            for (auto& g : grads.weights)
                for (double& v : g) v *= scale;
            for (auto& g : grads.biases)
                for (double& v : g) v *= scale;
            adam_step(net, grads, adam);
            pos = batch_end;
        }
        history.push_back(epoch_loss / static_cast<double>(n));
    }
    return history;
}

void save_model(const MlpNetwork& net, const NormalizationStats& stats,
                const std::string& role, const std::filesystem::path& path) {
    nlohmann::json j;
    j["role"] = role;
    j["layer_sizes"] = net.layer_sizes;
    j["weights"] = net.weights;
    j["biases"] = net.biases;
    nlohmann::json norm;
    norm["features"] = nlohmann::json::array();
    for (const FeatureStat& f : stats.features) {
        norm["features"].push_back({{"name", f.name}, {"min", f.min}, {"max", f.max}});
    }
    j["normalization"] = norm;
    atomic_write_file(path, j.dump(2) + "\n");
}

LoadedModel load_model(const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) {
        throw ParseError("malformed model file: " + path.string());
    }
    LoadedModel model;
    try {
        model.role = j.value("role", std::string{});
        model.net.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
        model.net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
        model.net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
        if (j.contains("normalization")) {
            for (const auto& e : j["normalization"].value("features", nlohmann::json::array())) {
                FeatureStat f;
                f.name = e.at("name").get<std::string>();
                f.min = e.at("min").get<double>();
                f.max = e.at("max").get<double>();
                model.stats.features.push_back(std::move(f));
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model file " + path.string() + ": " + e.what());
    }

    const auto& sizes = model.net.layer_sizes;
    if (sizes.size() < 2 || model.net.weights.size() != sizes.size() - 1 ||
        model.net.biases.size() != sizes.size() - 1) {
        throw ParseError("model file " + path.string() + ": layer structure inconsistent");
    }
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        if (sizes[l] <= 0 || sizes[l + 1] <= 0 ||
            model.net.weights[l].size() !=
                static_cast<std::size_t>(sizes[l]) * static_cast<std::size_t>(sizes[l + 1]) ||
            model.net.biases[l].size() != static_cast<std::size_t>(sizes[l + 1])) {
            throw ParseError("model file " + path.string() + ": matrix shape mismatch");
        }
        for (double v : model.net.weights[l]) {
            if (!std::isfinite(v))
                throw ParseError("model file " + path.string() + ": non-finite parameter");
        }
        for (double v : model.net.biases[l]) {
            if (!std::isfinite(v))
                throw ParseError("model file " + path.string() + ": non-finite parameter");
        }
    }
    return model;
}

} // namespace spoofdet
