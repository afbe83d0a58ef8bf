#pragma once

// Deep Q-learning agent: observation encoding, epsilon-greedy selection
// over the feasible-action mask, temporal-difference updates with an
// optional target network, and the episode training loop.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "orants/env.hpp"
#include "orants/error.hpp"
#include "orants/mlp.hpp"
#include "orants/replay.hpp"
#include "orants/rng.hpp"

namespace orants {

inline constexpr int kHiddenWidths[3] = {24, 48, 24};
inline constexpr double kTimeTau = 6.283185307179586476925287 / 1440.0;

// ---------------------------------------------------------------------------
// observation encoding

struct EncoderConfig {
    bool append_flat_c = false;
};

/// Observation -> feature vector in [-1, 1]: per-VNF congestion bit,
/// per-VNF normalized load, and the time of day on the unit circle.
class FeatureEncoder {
public:
    FeatureEncoder(int n_vnfs, int n_chains, EncoderConfig cfg = {})
        : n_vnfs_(n_vnfs), n_chains_(n_chains), cfg_(cfg) {}

    int dim() const {
        return 2 * n_vnfs_ + 2 + (cfg_.append_flat_c ? n_chains_ * n_vnfs_ : 0);
    }

    std::vector<double> encode(const Observation& obs) const {
        std::vector<double> f;
        f.reserve(static_cast<std::size_t>(dim()));
        std::vector<std::uint8_t> bits = obs.congestion.column_max();
        for (int j = 0; j < n_vnfs_; ++j)
            f.push_back(j < static_cast<int>(bits.size()) && bits[static_cast<std::size_t>(j)] ? 1.0 : 0.0);
        for (int j = 0; j < n_vnfs_; ++j) {
            double load = j < static_cast<int>(obs.vnf_load.size())
                              ? obs.vnf_load[static_cast<std::size_t>(j)]
                              : 0.0;
            f.push_back(std::clamp(load, 0.0, 1.0));
        }
        f.push_back(std::sin(kTimeTau * obs.t));
        f.push_back(std::cos(kTimeTau * obs.t));
        if (cfg_.append_flat_c)
            for (int i = 0; i < n_chains_; ++i)
                for (int j = 0; j < n_vnfs_; ++j)
                    f.push_back(i < obs.congestion.n_chains && j < obs.congestion.n_vnfs
                                    ? static_cast<double>(obs.congestion.at(i, j))
                                    : 0.0);
        return f;
    }

    int n_vnfs() const { return n_vnfs_; }
    int n_chains() const { return n_chains_; }
    const EncoderConfig& config() const { return cfg_; }

private:
    int n_vnfs_;
    int n_chains_;
    EncoderConfig cfg_;
};

// ---------------------------------------------------------------------------
// action selection

/// Epsilon-greedy restricted to feasible actions; greedy ties resolve to
/// the lowest index.
inline int select_action(const QNetwork& net, std::span<const double> features,
                         std::span<const std::uint8_t> mask, double epsilon, Rng& rng) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
        throw Error(ErrorCategory::Config, "epsilon must lie in [0,1]");
    std::vector<int> feasible;
    feasible.reserve(mask.size());
    for (std::size_t a = 0; a < mask.size(); ++a)
        if (mask[a]) feasible.push_back(static_cast<int>(a));
    if (feasible.empty())
        throw Error(ErrorCategory::Internal, "action mask admits no action");

    if (rng.uniform() < epsilon)
        return feasible[static_cast<std::size_t>(rng.below(feasible.size()))];

    std::vector<double> q = forward(net, features);
    if (q.size() != mask.size())
        throw Error(ErrorCategory::Internal, "mask length does not match Q output");
    int best = feasible.front();
    for (int a : feasible)
        if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
    return best;
}

// ---------------------------------------------------------------------------
// temporal-difference learning

inline std::vector<double> td_targets(const QNetwork& target_net,
                                      std::span<const Transition> batch, double gamma) {
    std::vector<double> y;
    y.reserve(batch.size());
    for (const Transition& tr : batch) {
        if (tr.done) {
            y.push_back(tr.reward);
            continue;
        }
        std::vector<double> q2 = forward(target_net, tr.next_state);
        double best = q2.front();
        for (double v : q2) best = std::max(best, v);
        y.push_back(tr.reward + gamma * best);
    }
    return y;
}

/// Mean squared error on the taken actions only.
inline double td_loss(const QNetwork& net, const QNetwork& target_net,
                      std::span<const Transition> batch, double gamma) {
    if (batch.empty()) throw Error(ErrorCategory::Internal, "empty batch");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(ErrorCategory::Config, "gamma must lie in [0,1)");
    std::vector<double> y = td_targets(target_net, batch, gamma);
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        std::vector<double> q = forward(net, batch[i].state);
        double diff = q[static_cast<std::size_t>(batch[i].action)] - y[i];
        loss += diff * diff;
    }
    return loss / static_cast<double>(batch.size());
}

inline Gradients td_gradients(const QNetwork& net, const QNetwork& target_net,
                              std::span<const Transition> batch, double gamma,
                              double* loss_out = nullptr) {
    if (batch.empty()) throw Error(ErrorCategory::Internal, "empty batch");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw Error(ErrorCategory::Config, "gamma must lie in [0,1)");
    std::vector<double> y = td_targets(target_net, batch, gamma);
    Gradients grads = Gradients::zeros_like(net);
    double loss = 0.0;
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    ForwardCache cache;
    std::vector<double> dout(static_cast<std::size_t>(net.output_dim()), 0.0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& tr = batch[i];
        if (tr.action < 0 || tr.action >= net.output_dim())
            throw Error(ErrorCategory::Internal, "transition action out of range");
        std::vector<double> q = forward_cached(net, tr.state, &cache);
        double diff = q[static_cast<std::size_t>(tr.action)] - y[i];
        loss += diff * diff;
        std::fill(dout.begin(), dout.end(), 0.0);
        dout[static_cast<std::size_t>(tr.action)] = 2.0 * diff * inv_b;
        backward_accumulate(net, cache, dout, grads);
    }
    if (loss_out) *loss_out = loss * inv_b;
    return grads;
}

/// One SGD step toward r + gamma * max_a' Q_target(s', a'); returns the
/// pre-step batch loss.
inline double td_update(QNetwork& net, const QNetwork& target_net,
                        std::span<const Transition> batch, double gamma, double lr) {
    double loss = 0.0;
    Gradients grads = td_gradients(net, target_net, batch, gamma, &loss);
    apply_sgd(net, grads, lr);
    return loss;
}

// ---------------------------------------------------------------------------
// training loop

struct TrainConfig {
    int episodes = 50;
    std::size_t replay_capacity = 10000;
    int batch_size = 32;
    int warmup = 500; // transitions collected before updates start
    double lr = 0.005;
    double gamma = 0.95;
    double eps_start = 1.0;
    double eps_end = 0.05;
    double eps_decay_per_episode = 0.995;
    int target_sync_steps = 250;
    bool use_target_net = true;
    bool use_action_mask = true;
    int train_every = 1;
    std::uint64_t seed = 3;
    std::function<void(int episode, double episode_return, double epsilon, double mean_loss)>
        on_episode;
};

struct TrainResult {
    QNetwork net;
    std::vector<double> episode_return;
    int convergence_episode = -1; // 0-based; -1 when the curve never settles
};

/// First episode whose trailing-5 mean return is within 5% of the best
/// trailing-5 window (range-normalized).
inline int convergence_episode(std::span<const double> returns) {
    if (returns.size() < 5) return -1;
    std::vector<double> trailing;
    for (std::size_t e = 4; e < returns.size(); ++e) {
        double m = 0.0;
        for (std::size_t i = e - 4; i <= e; ++i) m += returns[i];
        trailing.push_back(m / 5.0);
    }
    double best = *std::max_element(trailing.begin(), trailing.end());
    double worst = *std::min_element(trailing.begin(), trailing.end());
    double threshold = best - 0.05 * (best - worst);
    for (std::size_t i = 0; i < trailing.size(); ++i)
        if (trailing[i] >= threshold) return static_cast<int>(i + 4);
    return -1;
}

inline TrainResult train(OranEnv& env, const FeatureEncoder& encoder, const TrainConfig& cfg) {
    if (cfg.episodes <= 0) throw Error(ErrorCategory::Config, "episodes must be positive");
    if (cfg.batch_size <= 0) throw Error(ErrorCategory::Config, "batch size must be positive");

    TrainResult result;
    result.net = QNetwork::init(encoder.dim(), env.n_actions(),
                                std::span<const int>(kHiddenWidths, 3), mix_seed(cfg.seed, 1));
    QNetwork target = result.net;
    ReplayBuffer buffer(cfg.replay_capacity, mix_seed(cfg.seed, 2));
    Rng explore(mix_seed(cfg.seed, 3));
    std::vector<std::uint8_t> full_mask(static_cast<std::size_t>(env.n_actions()), 1);

    double eps = cfg.eps_start;
    long long step_count = 0;
    for (int ep = 0; ep < cfg.episodes; ++ep) {
        Observation obs = env.reset();
        std::vector<double> state = encoder.encode(obs);
        double ret = 0.0;
        double loss_sum = 0.0;
        long long loss_count = 0;
        while (!env.done()) {
            std::vector<std::uint8_t> mask = cfg.use_action_mask ? env.action_mask() : full_mask;
            int a = select_action(result.net, state, mask, eps, explore);
            StepOutcome out = env.step(Action::from_index(a, env.n_vnfs()));
            std::vector<double> next_state = encoder.encode(out.obs);
            ret += out.reward;
            buffer.push({state, a, out.reward, next_state, out.done});
            state = std::move(next_state);

            ++step_count;
            if (buffer.size() >= static_cast<std::size_t>(cfg.warmup) &&
                step_count % cfg.train_every == 0) {
                auto batch = buffer.sample(std::min<std::size_t>(
                    static_cast<std::size_t>(cfg.batch_size), buffer.size()));
                loss_sum += td_update(result.net, cfg.use_target_net ? target : result.net, batch,
                                      cfg.gamma, cfg.lr);
                ++loss_count;
            }
            if (cfg.use_target_net && step_count % cfg.target_sync_steps == 0)
                target = result.net;
        }
        result.episode_return.push_back(ret);
        if (cfg.on_episode)
            cfg.on_episode(ep, ret, eps, loss_count > 0 ? loss_sum / loss_count : 0.0);
        eps = std::max(cfg.eps_end, eps * cfg.eps_decay_per_episode);
    }
    result.convergence_episode = convergence_episode(result.episode_return);
    return result;
}

// ---------------------------------------------------------------------------
// checkpoints

struct Checkpoint {
    QNetwork net;
    EncoderConfig encoder_cfg;
    int n_vnfs = 0;
    int n_chains = 0;
    nlohmann::json hyperparameters;
    std::vector<double> episode_return;
    int convergence_episode = -1;
};

inline nlohmann::json train_config_json(const TrainConfig& cfg) {
    return {{"episodes", cfg.episodes},
            {"replay_capacity", cfg.replay_capacity},
            {"batch_size", cfg.batch_size},
            {"warmup", cfg.warmup},
            {"lr", cfg.lr},
            {"gamma", cfg.gamma},
            {"eps_start", cfg.eps_start},
            {"eps_end", cfg.eps_end},
            {"eps_decay_per_episode", cfg.eps_decay_per_episode},
            {"target_sync_steps", cfg.target_sync_steps},
            {"use_target_net", cfg.use_target_net},
            {"use_action_mask", cfg.use_action_mask},
            {"train_every", cfg.train_every},
            {"seed", cfg.seed}};
}

inline void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kind"] = "orants-dqn-checkpoint";
    j["layer_sizes"] = ck.net.sizes;
    j["weights"] = ck.net.weights;
    j["biases"] = ck.net.biases;
    j["encoder"] = {{"n_vnfs", ck.n_vnfs},
                    {"n_chains", ck.n_chains},
                    {"append_flat_c", ck.encoder_cfg.append_flat_c}};
    j["hyperparameters"] = ck.hyperparameters;
    j["episode_return"] = ck.episode_return;
    j["convergence_episode"] = ck.convergence_episode;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCategory::Checkpoint, "cannot write checkpoint: " + path);
    out << j.dump(2) << "\n";
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCategory::Checkpoint, "cannot open checkpoint: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(ErrorCategory::Checkpoint, "malformed checkpoint: " + std::string(e.what()));
    }
    if (j.value("schema_version", 0) != 1)
        throw Error(ErrorCategory::Checkpoint, "unsupported checkpoint schema");
    Checkpoint ck;
    ck.net.sizes = j.at("layer_sizes").get<std::vector<int>>();
    ck.net.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    ck.net.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    ck.n_vnfs = j.at("encoder").at("n_vnfs").get<int>();
    ck.n_chains = j.at("encoder").at("n_chains").get<int>();
    ck.encoder_cfg.append_flat_c = j.at("encoder").at("append_flat_c").get<bool>();
    ck.hyperparameters = j.value("hyperparameters", nlohmann::json::object());
    ck.episode_return = j.value("episode_return", std::vector<double>{});
    ck.convergence_episode = j.value("convergence_episode", -1);

    if (ck.net.sizes.size() < 2)
        throw Error(ErrorCategory::Checkpoint, "checkpoint has no layers");
    for (int l = 0; l < ck.net.n_layers(); ++l) {
        std::size_t in_dim = static_cast<std::size_t>(ck.net.sizes[static_cast<std::size_t>(l)]);
        std::size_t out_dim = static_cast<std::size_t>(ck.net.sizes[static_cast<std::size_t>(l) + 1]);
        if (ck.net.weights[static_cast<std::size_t>(l)].size() != in_dim * out_dim ||
            ck.net.biases[static_cast<std::size_t>(l)].size() != out_dim)
            throw Error(ErrorCategory::Checkpoint, "checkpoint weight shapes are inconsistent");
    }
    return ck;
}

/// Shape compatibility between a checkpoint and a scenario's action space.
inline void validate_checkpoint_for(const Checkpoint& ck, int n_vnfs, int n_chains) {
    FeatureEncoder enc(ck.n_vnfs, ck.n_chains, ck.encoder_cfg);
    if (ck.n_vnfs != n_vnfs || ck.n_chains != n_chains)
        throw Error(ErrorCategory::Checkpoint,
                    "checkpoint was trained for V=" + std::to_string(ck.n_vnfs) + ", K=" +
                        std::to_string(ck.n_chains) + " but the scenario has V=" +
                        std::to_string(n_vnfs) + ", K=" + std::to_string(n_chains));
    if (ck.net.output_dim() != action_space_size(n_vnfs))
        throw Error(ErrorCategory::Checkpoint,
                    "checkpoint output dim " + std::to_string(ck.net.output_dim()) +
                        " != action space " + std::to_string(action_space_size(n_vnfs)));
    if (ck.net.input_dim() != enc.dim())
        throw Error(ErrorCategory::Checkpoint,
                    "checkpoint input dim " + std::to_string(ck.net.input_dim()) +
                        " != encoder dim " + std::to_string(enc.dim()));
}

} // namespace orants
