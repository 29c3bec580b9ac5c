#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aoinoma/agents.hpp"
#include "aoinoma/baselines.hpp"
#include "aoinoma/dqn/heads.hpp"
#include "aoinoma/dqn/mlp.hpp"
#include "aoinoma/dqn/replay.hpp"
#include "aoinoma/mdp_env.hpp"

namespace aoinoma::dqn {

struct TrainConfig {
    int episodes = 400;
    int steps = 300;
    int replay = 200;
    int batch = 32;
    double gamma = 0.9;
    AdamConfig adam;
    agents::ExplorationSchedule exploration;
    int clone_period = 100;  ///< environment steps between target refreshes
    bool double_dqn = true;
    double grad_clip = 10.0;
    int hidden_units = 64;
    int hidden_layers = 3;

    void validate() const;
};

/// Per-episode aggregates. Rates, powers, rewards and AoI are slot means;
/// cpu_energy_j is the episode total.
struct EpisodeMetrics {
    int episode = 0;
    int steps = 0;
    double reward_raw = 0.0;
    double reward_penalized = 0.0;
    double loss = 0.0;  ///< mean over the episode's gradient steps, 0 if none
    int updates = 0;
    double epsilon = 0.0;
    double aaoi_s = 0.0;
    double ee_bits_per_joule_per_hz = 0.0;
    double r_total_bps = 0.0;
    double p_total_w = 0.0;
    env::PacketCounters packets;
    double cpu_energy_j = 0.0;
};

/// Mean over the batch of (y - Q(s,a))^2 with y = r + gamma * Q_target(s', a')
/// and a' the best feasible next action (chosen by the online network when
/// double_dqn is set, by the target network otherwise). Adds the gradient with
/// respect to the online parameters to *grad when given.
double bellman_loss(const Mlp& online, const Mlp& target, const ActionHeads& heads,
                    std::span<const Transition* const> batch, double gamma, bool double_dqn,
                    std::vector<double>* grad);

std::vector<int> network_sizes(int input_dim, const TrainConfig& cfg, int output_dim);

class Trainer {
public:
    Trainer(const mdp::EnvConfig& env_cfg, const TrainConfig& cfg, baselines::Scheme scheme, int matching_capacity,
            std::uint64_t seed);

    /// One exploring, learning episode.
    EpisodeMetrics train_episode();
    std::vector<EpisodeMetrics> train();
    /// One greedy episode without learning.
    EpisodeMetrics evaluate_episode();

    Checkpoint checkpoint() const;
    void restore(const Checkpoint& ckpt);

    const Mlp& online() const { return online_; }
    const Mlp& target() const { return target_; }
    const ActionHeads& heads() const { return heads_; }
    const mdp::NomaEnv& env() const { return env_; }
    const ReplayMemory& memory() const { return memory_; }
    const TrainConfig& config() const { return cfg_; }
    baselines::Scheme scheme() const { return scheme_; }
    long global_step() const { return global_step_; }
    long clone_count() const { return clones_; }

private:
    EpisodeMetrics run_episode(bool learn);
    mdp::ActionSpace space_for(const mdp::DecisionContext& ctx) const;
    double learn_step();

    TrainConfig cfg_;
    baselines::Scheme scheme_;
    int matching_capacity_;
    mdp::NomaEnv env_;
    ActionHeads heads_;
    Rng explore_rng_;
    Rng replay_rng_;
    Rng baseline_rng_;
    Mlp online_;
    Mlp target_;
    AdamState adam_;
    ReplayMemory memory_;
    long global_step_ = 0;
    long clones_ = 0;
    int episodes_done_ = 0;
    std::vector<double> grad_;
};

}  // namespace aoinoma::dqn
