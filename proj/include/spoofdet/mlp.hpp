#ifndef SPOOFDET_MLP_HPP
#define SPOOFDET_MLP_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spoofdet/features.hpp"

namespace spoofdet {

// Dense feedforward network: ReLU on hidden layers, identity output.
// weights[l] is row-major (fan_in rows x fan_out columns).
struct MlpNetwork {
    std::vector<int> layer_sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    std::size_t layer_count() const { return weights.size(); }
    std::size_t parameter_count() const;
};

// Per-parameter buffers shaped like a network; used for gradients and
// ADAM moment accumulators.
struct ParamSet {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    static ParamSet zeros_like(const MlpNetwork& net);
    void fill(double value);
};

struct AdamState {
    ParamSet first_moment;
    ParamSet second_moment;
    long step = 0;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    static AdamState init(const MlpNetwork& net, double learning_rate = 1e-3);
};

struct TrainConfig {
    int epochs = 1000;
    int batch_size = 32;
    std::uint64_t rng_seed = 0;
    double learning_rate = 1e-3;
    // loss is mean absolute error
};

// Rows stored structure-of-arrays; all inputs (targets) have equal width.
struct MlpDataset {
    std::size_t input_dim = 0;
    std::size_t target_dim = 0;
    std::vector<double> inputs;
    std::vector<double> targets;

    std::size_t size() const { return input_dim ? inputs.size() / input_dim : 0; }
    void add_row(const std::vector<double>& input, const std::vector<double>& target);
    const double* input_row(std::size_t i) const { return inputs.data() + i * input_dim; }
    const double* target_row(std::size_t i) const { return targets.data() + i * target_dim; }
};

// Glorot-uniform weights, zero biases; deterministic under seed.
MlpNetwork init_network(const std::vector<int>& layer_sizes, std::uint64_t rng_seed);

std::vector<double> forward(const MlpNetwork& net, const std::vector<double>& input);

// Scratch space reused across forward/backward calls in hot loops.
struct MlpWorkspace {
    std::vector<std::vector<double>> activations;    // per layer boundary
    std::vector<std::vector<double>> preactivations; // per weight layer
    std::vector<std::vector<double>> deltas;
};

void forward_into(const MlpNetwork& net, const double* input, MlpWorkspace& ws);

// MAE loss L = mean_k |y_k - t_k|. Accumulates dL/dparam into `grads`
// (does not zero them first) and returns the loss. Subgradient 0 at the
// |.| kink and at the ReLU kink.
double accumulate_gradients_mae(const MlpNetwork& net, const double* input,
                                const double* target, ParamSet& grads, MlpWorkspace& ws);

// Allocating convenience wrapper; validates shapes and finiteness.
double gradients_mae(const MlpNetwork& net, const std::vector<double>& input,
                     const std::vector<double>& target, ParamSet& grads);

// Standard ADAM update with bias correction; denominator sqrt(v_hat) + eps.
void adam_step(MlpNetwork& net, const ParamSet& grads, AdamState& state);

// Minibatch ADAM training under MAE; per-epoch reshuffle from cfg.rng_seed.
// Returns per-epoch mean sample loss.
std::vector<double> train(MlpNetwork& net, const MlpDataset& data, const TrainConfig& cfg);

// JSON model file; parameters round-trip bit-exactly for finite doubles.
void save_model(const MlpNetwork& net, const NormalizationStats& stats,
                const std::string& role, const std::filesystem::path& path);

struct LoadedModel {
    MlpNetwork net;
    NormalizationStats stats;
    std::string role;
};

LoadedModel load_model(const std::filesystem::path& path);

} // namespace spoofdet

#endif
