#include "spoofdet/rl.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "spoofdet/errors.hpp"
#include "spoofdet/io_util.hpp"

namespace spoofdet {

void validate(const QLearningConfig& cfg) {
    if (!(cfg.alpha > 0.0)) throw ValidationError("rl: alpha must be > 0");
    if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw ValidationError("rl: gamma must be in [0,1]");
    if (!(cfg.threshold_step_m > 0.0)) throw ValidationError("rl: threshold step must be > 0");
    if (!(cfg.threshold_max_m > 0.0)) throw ValidationError("rl: threshold max must be > 0");
    if (cfg.threshold_initial_m < 0.0 || cfg.threshold_initial_m > cfg.threshold_max_m)
        throw ValidationError("rl: initial threshold outside [0, threshold_max]");
    if (cfg.epsilon_start < 0.0 || cfg.epsilon_start > 1.0 || cfg.epsilon_end < 0.0 ||
        cfg.epsilon_end > 1.0)
        throw ValidationError("rl: epsilon bounds must be in [0,1]");
    if (cfg.epsilon_decay_fraction < 0.0 || cfg.epsilon_decay_fraction > 1.0)
        throw ValidationError("rl: epsilon decay fraction must be in [0,1]");
    if (cfg.batch_size <= 0) throw ValidationError("rl: batch size must be positive");
    if (cfg.replay_capacity == 0) throw ValidationError("rl: replay capacity must be positive");
    if (cfg.total_steps == 0) throw ValidationError("rl: total steps must be positive");
    if (cfg.target_sync_period == 0) throw ValidationError("rl: target sync period must be positive");
    if (!(cfg.rewards.correct > 0.0) || !(cfg.rewards.incorrect < 0.0))
        throw ValidationError("rl: rewards must satisfy correct > 0 > incorrect");
}

EnvStepResult env_step(const ThresholdState& state, Action action, const DdSample& sample,
                       const QLearningConfig& cfg) {
    EnvStepResult result;
    double t = state.threshold_m;
    switch (action) {
        case Action::IncreaseThreshold: t += cfg.threshold_step_m; break;
        case Action::DecreaseThreshold: t -= cfg.threshold_step_m; break;
        case Action::KeepThreshold: break;
    }
    result.next.threshold_m = std::clamp(t, 0.0, cfg.threshold_max_m);
    result.detection = sample.dd_m > result.next.threshold_m;
    const bool matches = result.detection == (sample.label != 0);
    result.reward = matches ? cfg.rewards.correct : cfg.rewards.incorrect;
    return result;
}

double q_update(double q_current, double q_next_max, double reward, const QLearningConfig& cfg) {
    return q_current + cfg.alpha * (reward + cfg.gamma * q_next_max - q_current);
}

MlpNetwork build_qnet(std::uint64_t rng_seed) {
    return init_network(kQNetworkLayers, rng_seed);
}

Action select_action(const MlpNetwork& qnet, double dd_m, double epsilon, Rng& rng) {
    if (epsilon < 0.0 || epsilon > 1.0) {
        throw ValidationError("select_action: epsilon must be in [0,1]");
    }
    if (epsilon > 0.0 && rng.uniform01() < epsilon) {
        return static_cast<Action>(rng.uniform_index(kActionCount));
    }
    const std::vector<double> q = forward(qnet, {dd_m});
    int best = 0;
    for (int a = 1; a < kActionCount; ++a) {
        if (q[a] > q[best]) best = a; // strict: ties keep the lower index
    }
    return static_cast<Action>(best);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ValidationError("replay capacity must be positive");
    storage_.resize(capacity);
}

void ReplayBuffer::push(const Transition& t) {
    storage_[next_] = t;
    next_ = (next_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
    return storage_[rng.uniform_index(size_)];
}

namespace {

double epsilon_at(const QLearningConfig& cfg, std::size_t step) {
    const double decay_steps =
        cfg.epsilon_decay_fraction * static_cast<double>(cfg.total_steps);
    if (decay_steps <= 0.0 || static_cast<double>(step) >= decay_steps) {
        return cfg.epsilon_end;
    }
    const double frac = static_cast<double>(step) / decay_steps;
    return cfg.epsilon_start + frac * (cfg.epsilon_end - cfg.epsilon_start);
}

} // namespace

AgentResult train_agent(const std::vector<DdSample>& series, const QLearningConfig& cfg) {
    validate(cfg);
    if (series.size() < 2) {
        throw ValidationError("train_agent: series needs >= 2 samples");
    }
    bool has_attack = false;
    bool has_clean = false;
    for (const DdSample& s : series) {
        if (!std::isfinite(s.dd_m) || s.dd_m < 0.0) {
            throw ValidationError("train_agent: DD values must be finite and >= 0");
        }
        if (s.label != 0) {
            has_attack = true;
        } else {
            has_clean = true;
        }
    }
    if (!has_attack || !has_clean) {
        throw ValidationError("train_agent: series must contain both attack and clean samples");
    }

    Rng rng(cfg.rng_seed);
    AgentResult result;
    result.qnet = build_qnet(cfg.rng_seed);
    MlpNetwork target_net = result.qnet;

    AdamState adam = AdamState::init(result.qnet, cfg.q_learning_rate);
    ParamSet grads = ParamSet::zeros_like(result.qnet);
    MlpWorkspace ws;
    MlpWorkspace target_ws;
    ReplayBuffer replay(cfg.replay_capacity);

    ThresholdState state{cfg.threshold_initial_m};
    std::size_t global_step = 0;

    while (global_step < cfg.total_steps) {
        state.threshold_m = cfg.threshold_initial_m; // episode reset
        double episode_reward = 0.0;

        for (std::size_t t = 0; t < series.size(); ++t) {
            const double epsilon = epsilon_at(cfg, global_step);
            const Action action = select_action(result.qnet, series[t].dd_m, epsilon, rng);
            const EnvStepResult step = env_step(state, action, series[t], cfg);
            state = step.next;
            episode_reward += step.reward;

            Transition tr;
            tr.dd_m = series[t].dd_m;
            tr.action = static_cast<int>(action);
            tr.reward = step.reward;
            tr.terminal = t + 1 == series.size();
            tr.next_dd_m = tr.terminal ? 0.0 : series[t + 1].dd_m;
            replay.push(tr);

            ++global_step;

            if (replay.size() >= static_cast<std::size_t>(cfg.batch_size)) {
                grads.fill(0.0);
                for (int b = 0; b < cfg.batch_size; ++b) {
                    const Transition& sample = replay.sample(rng);
                    // regression target: reward plus discounted best value
                    // of the next observation from the frozen target copy
                    double y = sample.reward;
                    if (!sample.terminal) {
                        forward_into(target_net, &sample.next_dd_m, target_ws);
                        const std::vector<double>& qn = target_ws.activations.back();
                        y += cfg.gamma * *std::max_element(qn.begin(), qn.end());
                    }
                    forward_into(result.qnet, &sample.dd_m, ws);
                    std::vector<double> target = ws.activations.back();
                    target[sample.action] = y; // other outputs contribute no gradient
                    accumulate_gradients_mae(result.qnet, &sample.dd_m, target.data(), grads, ws);
                }
                const double scale = 1.0 / static_cast<double>(cfg.batch_size);
                for (auto& g : grads.weights)
                    for (double& v : g) v *= scale;
                for (auto& g : grads.biases)
                    for (double& v : g) v *= scale;
                adam_step(result.qnet, grads, adam);
            }

            if (global_step % cfg.target_sync_period == 0) {
                target_net = result.qnet;
            }
        }
        result.episode_rewards.push_back(episode_reward);
    }

    result.threshold = state;
    return result;
}

static nlohmann::json config_to_json(const QLearningConfig& cfg) {
    return {{"alpha", cfg.alpha},
            {"gamma", cfg.gamma},
            {"total_steps", cfg.total_steps},
            {"epsilon_start", cfg.epsilon_start},
            {"epsilon_end", cfg.epsilon_end},
            {"epsilon_decay_fraction", cfg.epsilon_decay_fraction},
            {"replay_capacity", cfg.replay_capacity},
            {"batch_size", cfg.batch_size},
            {"target_sync_period", cfg.target_sync_period},
            {"threshold_step_m", cfg.threshold_step_m},
            {"threshold_initial_m", cfg.threshold_initial_m},
            {"threshold_max_m", cfg.threshold_max_m},
            {"q_learning_rate", cfg.q_learning_rate},
            {"rng_seed", cfg.rng_seed},
            {"reward_correct", cfg.rewards.correct},
            {"reward_incorrect", cfg.rewards.incorrect}};
}

static QLearningConfig config_from_json(const nlohmann::json& j) {
    QLearningConfig cfg;
    cfg.alpha = j.value("alpha", cfg.alpha);
    cfg.gamma = j.value("gamma", cfg.gamma);
    cfg.total_steps = j.value("total_steps", cfg.total_steps);
    cfg.epsilon_start = j.value("epsilon_start", cfg.epsilon_start);
    cfg.epsilon_end = j.value("epsilon_end", cfg.epsilon_end);
    cfg.epsilon_decay_fraction = j.value("epsilon_decay_fraction", cfg.epsilon_decay_fraction);
    cfg.replay_capacity = j.value("replay_capacity", cfg.replay_capacity);
    cfg.batch_size = j.value("batch_size", cfg.batch_size);
    cfg.target_sync_period = j.value("target_sync_period", cfg.target_sync_period);
    cfg.threshold_step_m = j.value("threshold_step_m", cfg.threshold_step_m);
    cfg.threshold_initial_m = j.value("threshold_initial_m", cfg.threshold_initial_m);
    cfg.threshold_max_m = j.value("threshold_max_m", cfg.threshold_max_m);
    cfg.q_learning_rate = j.value("q_learning_rate", cfg.q_learning_rate);
    cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
    cfg.rewards.correct = j.value("reward_correct", cfg.rewards.correct);
    cfg.rewards.incorrect = j.value("reward_incorrect", cfg.rewards.incorrect);
    return cfg;
}

void save_agent(const AgentResult& agent, const QLearningConfig& cfg,
                const std::filesystem::path& path) {
    nlohmann::json qnet;
    qnet["role"] = "qnet";
    qnet["layer_sizes"] = agent.qnet.layer_sizes;
    qnet["weights"] = agent.qnet.weights;
    qnet["biases"] = agent.qnet.biases;
    qnet["normalization"] = {{"features", nlohmann::json::array()}};

    nlohmann::json j;
    j["threshold_m"] = agent.threshold.threshold_m;
    j["qnet"] = qnet;
    j["config"] = config_to_json(cfg);
    j["reward_history"] = agent.episode_rewards;
    atomic_write_file(path, j.dump(2) + "\n");
}

LoadedAgent load_agent(const std::filesystem::path& path) {
    nlohmann::json j = nlohmann::json::parse(read_file(path), nullptr, false);
    if (j.is_discarded()) {
        throw ParseError("malformed agent file: " + path.string());
    }
    LoadedAgent agent;
    try {
        agent.threshold_m = j.at("threshold_m").get<double>();
        agent.config = config_from_json(j.at("config"));
        agent.reward_history = j.value("reward_history", std::vector<double>{});
        const auto& q = j.at("qnet");
        agent.qnet.layer_sizes = q.at("layer_sizes").get<std::vector<int>>();
        agent.qnet.weights = q.at("weights").get<std::vector<std::vector<double>>>();
        agent.qnet.biases = q.at("biases").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("agent file " + path.string() + ": " + e.what());
    }
    if (!std::isfinite(agent.threshold_m) || agent.threshold_m < 0.0) {
        throw ParseError("agent file " + path.string() + ": invalid threshold");
    }
    return agent;
}

} // namespace spoofdet
