#include "aoinoma/dqn/trainer.hpp"

#include <algorithm>
#include <stdexcept>

namespace aoinoma::dqn {

void TrainConfig::validate() const
{
    if (episodes < 1 || steps < 1) {
        throw std::invalid_argument("episodes and steps must be >= 1");
    }
    if (replay < 1 || batch < 1 || batch > replay) {
        throw std::invalid_argument("batch must lie in [1, replay]");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("gamma must lie in [0, 1)");
    }
    if (adam.lr < 0.0 || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0) ||
        !(adam.eps > 0.0)) {
        throw std::invalid_argument("invalid Adam settings");
    }
    exploration.validate();
    if (clone_period < 1) {
        throw std::invalid_argument("clone_period must be >= 1");
    }
    if (hidden_units < 1 || hidden_layers < 0) {
        throw std::invalid_argument("hidden_units must be >= 1 and hidden_layers >= 0");
    }
}

std::vector<int> network_sizes(int input_dim, const TrainConfig& cfg, int output_dim)
{
    std::vector<int> sizes{input_dim};
    for (int l = 0; l < cfg.hidden_layers; ++l) {
        sizes.push_back(cfg.hidden_units);
    }
    sizes.push_back(output_dim);
    return sizes;
}

double bellman_loss(const Mlp& online, const Mlp& target, const ActionHeads& heads,
                    std::span<const Transition* const> batch, double gamma, bool double_dqn,
                    std::vector<double>* grad)
{
    expects(!batch.empty(), "Bellman loss needs a non-empty batch");
    const int nb = static_cast<int>(batch.size());
    const int in_dim = online.input_dim();
    const int out_dim = online.output_dim();
    std::vector<double> states(static_cast<std::size_t>(in_dim) * nb);
    std::vector<double> next_states(states.size());
    for (int s = 0; s < nb; ++s) {
        expects(static_cast<int>(batch[s]->state.size()) == in_dim &&
                    static_cast<int>(batch[s]->next_state.size()) == in_dim,
                "transition state dimension does not match the network");
        for (int i = 0; i < in_dim; ++i) {
            states[static_cast<std::size_t>(i) * nb + s] = batch[s]->state[i];
            next_states[static_cast<std::size_t>(i) * nb + s] = batch[s]->next_state[i];
        }
    }

    Mlp::BatchTape target_tape;
    Mlp::BatchTape online_next_tape;
    Mlp::BatchTape tape;
    const std::vector<double>& q_target = target.forward_batch(next_states, nb, target_tape);
    const std::vector<double>* q_online_next = double_dqn ? &online.forward_batch(next_states, nb, online_next_tape)
                                                          : nullptr;
    const std::vector<double>& q = online.forward_batch(states, nb, tape);

    auto column = [&](const std::vector<double>& block, int s) {
        std::vector<double> out(out_dim);
        for (int o = 0; o < out_dim; ++o) {
            out[o] = block[static_cast<std::size_t>(o) * nb + s];
        }
        return out;
    };

    const double inv = 1.0 / nb;
    double loss = 0.0;
    std::vector<double> grad_out(static_cast<std::size_t>(out_dim) * nb, 0.0);
    for (int s = 0; s < nb; ++s) {
        const Transition* t = batch[s];
        const std::vector<double> qt = column(q_target, s);
        double bootstrap = 0.0;
        if (double_dqn) {
            const auto pick = heads.greedy(column(*q_online_next, s), t->next_ctx, t->next_space);
            bootstrap = heads.joint_q(qt, pick.action);
        } else {
            bootstrap = heads.greedy(qt, t->next_ctx, t->next_space).value;
        }
        const double y = t->reward + gamma * bootstrap;
        const std::vector<int> chosen = heads.selected_outputs(t->action);
        double pred = 0.0;
        for (int idx : chosen) {
            pred += q[static_cast<std::size_t>(idx) * nb + s];
        }
        const double err = pred - y;
        loss += err * err * inv;
        for (int idx : chosen) {
            grad_out[static_cast<std::size_t>(idx) * nb + s] += 2.0 * err * inv;
        }
    }
    if (grad) {
        online.backward_batch(tape, grad_out, *grad);
    }
    return loss;
}

Trainer::Trainer(const mdp::EnvConfig& env_cfg, const TrainConfig& cfg, baselines::Scheme scheme,
                 int matching_capacity, std::uint64_t seed)
    : cfg_(cfg),
      scheme_(scheme),
      matching_capacity_(matching_capacity),
      env_(env_cfg, seed),
      heads_(env_.model(),
             scheme == baselines::Scheme::UniformPower ? mdp::PowerRule::Uniform : mdp::PowerRule::Grid,
             baselines::scheme_flags(scheme).dqn_phi),
      explore_rng_(make_stream(seed, Stream::Exploration)),
      replay_rng_(make_stream(seed, Stream::Replay)),
      baseline_rng_(make_stream(seed, Stream::Baseline)),
      memory_(static_cast<std::size_t>(cfg.replay))
{
    cfg_.validate();
    expects(matching_capacity >= 1, "matching capacity must be >= 1");
    Rng init = make_stream(seed, Stream::Init);
    online_ = Mlp::glorot(network_sizes(env_.state_dim(), cfg_, heads_.output_dim()), init);
    target_ = online_;
    adam_ = AdamState(online_.param_count());
    grad_.assign(online_.param_count(), 0.0);
}

mdp::ActionSpace Trainer::space_for(const mdp::DecisionContext& ctx) const
{
    return baselines::action_space_for(scheme_, ctx, env_.model(), matching_capacity_);
}

double Trainer::learn_step()
{
    const auto idx = sample_minibatch(memory_, static_cast<std::size_t>(cfg_.batch), replay_rng_);
    std::vector<const Transition*> batch;
    batch.reserve(idx.size());
    for (std::size_t i : idx) {
        batch.push_back(&memory_.at(i));
    }
    std::fill(grad_.begin(), grad_.end(), 0.0);
    const double loss = bellman_loss(online_, target_, heads_, batch, cfg_.gamma, cfg_.double_dqn, &grad_);
    clip_grad_norm(grad_, cfg_.grad_clip);
    adam_step(online_.params(), grad_, adam_, cfg_.adam);
    return loss;
}

EpisodeMetrics Trainer::run_episode(bool learn)
{
    env_.reset();
    EpisodeMetrics em;
    em.episode = ++episodes_done_;
    double loss_sum = 0.0;
    mdp::ActionSpace space = space_for(env_.context());
    for (int step = 0; step < cfg_.steps; ++step) {
        const mdp::DecisionContext ctx = env_.context();
        std::vector<double> state = env_.encode();
        const double eps = learn ? agents::decay_epsilon(cfg_.exploration, global_step_) : 0.0;

        FactoredAction fa;
        if (learn && uniform01(explore_rng_) < eps) {
            fa = heads_.explore(ctx, space, explore_rng_);
        } else {
            fa = heads_.greedy(online_.forward(state), ctx, space).action;
        }
        mdp::ActionVector action = heads_.to_action(fa);
        if (!heads_.learns_phi()) {
            action.phi = baselines::random_transmission(ctx, env_.model(), space, action.rho, action.p_idx,
                                                        baseline_rng_);
            fa = heads_.from_action(action);
        }

        auto result = env_.step(action, space);
        const auto& sm = result.metrics;
        em.reward_raw += sm.reward_raw;
        em.reward_penalized += sm.reward_penalized;
        em.aaoi_s += sm.aaoi_s;
        em.ee_bits_per_joule_per_hz += sm.ee_bits_per_joule_per_hz;
        em.r_total_bps += sm.r_total_bps;
        em.p_total_w += sm.p_total_w;
        em.cpu_energy_j += sm.cpu_energy_j;
        em.packets += sm.packets;
        em.epsilon = eps;

        mdp::ActionSpace next_space = space_for(env_.context());
        if (learn) {
            const double scale = env_.reward_scale();
            const double signal = scale > 0.0 ? sm.reward_penalized / scale : 0.0;
            memory_.push({std::move(state), fa, signal, std::move(result.next_state), env_.context(), next_space});
            ++global_step_;
            if (memory_.size() >= static_cast<std::size_t>(cfg_.batch)) {
                loss_sum += learn_step();
                ++em.updates;
            }
            if (global_step_ % cfg_.clone_period == 0) {
                target_ = online_;
                ++clones_;
            }
        }
        space = std::move(next_space);
    }
    const double n = cfg_.steps;
    em.steps = cfg_.steps;
    em.reward_raw /= n;
    em.reward_penalized /= n;
    em.aaoi_s /= n;
    em.ee_bits_per_joule_per_hz /= n;
    em.r_total_bps /= n;
    em.p_total_w /= n;
    em.loss = em.updates > 0 ? loss_sum / em.updates : 0.0;
    return em;
}

EpisodeMetrics Trainer::train_episode() { return run_episode(true); }

std::vector<EpisodeMetrics> Trainer::train()
{
    std::vector<EpisodeMetrics> out;
    out.reserve(cfg_.episodes);
    for (int e = 0; e < cfg_.episodes; ++e) {
        out.push_back(train_episode());
    }
    return out;
}

EpisodeMetrics Trainer::evaluate_episode() { return run_episode(false); }

Checkpoint Trainer::checkpoint() const { return {online_, target_, adam_, global_step_}; }

void Trainer::restore(const Checkpoint& ckpt)
{
    expects(ckpt.online.sizes() == online_.sizes() && ckpt.target.sizes() == target_.sizes(),
            "checkpoint shape does not match this configuration");
    online_ = ckpt.online;
    target_ = ckpt.target;
    adam_ = ckpt.adam;
    global_step_ = ckpt.steps;
}

}  // namespace aoinoma::dqn
