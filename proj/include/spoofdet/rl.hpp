#ifndef SPOOFDET_RL_HPP
#define SPOOFDET_RL_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include "spoofdet/mlp.hpp"
#include "spoofdet/rng.hpp"

namespace spoofdet {

// Q-network shape: differential distance in, one Q-value per action out.
inline const std::vector<int> kQNetworkLayers{1, 24, 24, 3};

enum class Action : int {
    IncreaseThreshold = 0,
    DecreaseThreshold = 1,
    KeepThreshold = 2,
};
inline constexpr int kActionCount = 3;

// The agent's scalar state: the detection threshold on differential
// distance.
struct ThresholdState {
    double threshold_m = 0.0;
};

struct EnvObservation {
    double dd_m = 0.0;
};

struct RewardScheme {
    double correct = 1.0;
    double incorrect = -100.0; // large penalty prioritizes catching attacks
};

struct QLearningConfig {
    double alpha = 0.1;  // tabular update learning rate (q_update)
    double gamma = 0.95; // discount factor
    std::size_t total_steps = 10000;
    double epsilon_start = 1.0;
    double epsilon_end = 0.05;
    double epsilon_decay_fraction = 0.2; // of total_steps
    std::size_t replay_capacity = 10000;
    int batch_size = 32;
    std::size_t target_sync_period = 500;
    double threshold_step_m = 0.01;
    double threshold_initial_m = 0.0;
    double threshold_max_m = 200.0;
    double q_learning_rate = 1e-3; // ADAM rate for the Q-network
    std::uint64_t rng_seed = 0;
    RewardScheme rewards;
};

void validate(const QLearningConfig& cfg);

// One labeled observation of the environment's DD series.
struct DdSample {
    double dd_m = 0.0;
    std::uint8_t label = 0; // 1 = GPS compromised at this step
};

struct EnvStepResult {
    ThresholdState next;
    bool detection = false;
    double reward = 0.0;
};

// Applies the action to the threshold (clamped to [0, threshold_max]),
// then detects against the current sample: detection = dd > threshold,
// reward = correct when detection matches the label.
EnvStepResult env_step(const ThresholdState& state, Action action, const DdSample& sample,
                       const QLearningConfig& cfg);

// Q + alpha * (r + gamma * max_a' Q' - Q)
double q_update(double q_current, double q_next_max, double reward, const QLearningConfig& cfg);

MlpNetwork build_qnet(std::uint64_t rng_seed);

// Epsilon-greedy over the three Q-outputs; ties break toward the lowest
// action index.
Action select_action(const MlpNetwork& qnet, double dd_m, double epsilon, Rng& rng);

struct Transition {
    double dd_m = 0.0;
    int action = 0;
    double reward = 0.0;
    double next_dd_m = 0.0;
    bool terminal = false;
};

// Fixed-capacity ring; oldest transitions evicted first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);
    void push(const Transition& t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    const Transition& sample(Rng& rng) const;

private:
    std::vector<Transition> storage_;
    std::size_t capacity_;
    std::size_t size_ = 0;
    std::size_t next_ = 0;
};

struct AgentResult {
    MlpNetwork qnet;
    ThresholdState threshold;
    std::vector<double> episode_rewards;
};

// DQN training loop. One episode is a full pass over the series; the
// threshold resets to its configured initial value at each episode start
// (standard environment reset), which also bounds how far it can drift
// within the final episode. Episodes run until the cumulative step count
// reaches cfg.total_steps, always completing the episode in progress.
// Returns the Q-network, the threshold at the end of the last episode,
// and per-episode total rewards.
AgentResult train_agent(const std::vector<DdSample>& series, const QLearningConfig& cfg);

void save_agent(const AgentResult& agent, const QLearningConfig& cfg,
                const std::filesystem::path& path);

struct LoadedAgent {
    MlpNetwork qnet;
    double threshold_m = 0.0;
    QLearningConfig config;
    std::vector<double> reward_history;
};

LoadedAgent load_agent(const std::filesystem::path& path);

} // namespace spoofdet

#endif
