#include "aoinoma/mdp_env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aoinoma::mdp {

PowerGrid build_power_grid(double p_max_w, int q)
{
    expects(q >= 1, "power grid needs q >= 1");
    expects(p_max_w > 0.0, "power grid needs P_max > 0");
    PowerGrid grid;
    grid.p_max_w = p_max_w;
    grid.q = q;
    grid.step_w = p_max_w / (q + 1);
    grid.levels.resize(q + 1);
    for (int i = 0; i <= q; ++i) {
        grid.levels[i] = i * grid.step_w;
    }
    return grid;
}

ActionVector ActionVector::idle(int ues, int carriers, int types)
{
    return {Grid<std::uint8_t>(ues, carriers, 0), Grid<int>(ues, carriers, 0), Grid<std::uint8_t>(ues, types, 0)};
}

Grid<double> resolve_powers(const ActionVector& action, const SystemModel& model, const ActionSpace& space)
{
    const int ues = action.rho.rows();
    const int carriers = action.rho.cols();
    Grid<double> power(ues, carriers, 0.0);
    for (int m = 0; m < ues; ++m) {
        if (space.power == PowerRule::Uniform) {
            int assigned = 0;
            for (int n = 0; n < carriers; ++n) {
                assigned += action.rho(m, n);
            }
            for (int n = 0; n < carriers; ++n) {
                power(m, n) = action.rho(m, n) ? model.grid.p_max_w / assigned : 0.0;
            }
        } else {
            for (int n = 0; n < carriers; ++n) {
                const int idx = std::clamp(action.p_idx(m, n), 0, model.grid.q);
                power(m, n) = action.rho(m, n) ? model.grid.levels[idx] : 0.0;
            }
        }
    }
    return power;
}

Feasibility check_action(const ActionVector& action, const DecisionContext& ctx, const SystemModel& model,
                         const ActionSpace& space)
{
    Feasibility f;
    const int ues = model.ues;
    const int carriers = model.carriers();
    const int types = model.types();
    if (action.rho.rows() != ues || action.rho.cols() != carriers || action.p_idx.rows() != ues ||
        action.p_idx.cols() != carriers || action.phi.rows() != ues || action.phi.cols() != types) {
        f.structure = false;
        return f;
    }
    for (int m = 0; m < ues; ++m) {
        for (int n = 0; n < carriers; ++n) {
            const int idx = action.p_idx(m, n);
            const bool assigned = action.rho(m, n) != 0;
            if (action.rho(m, n) > 1 || idx < 0 || idx > model.grid.q || (!assigned && idx > 0)) {
                f.structure = false;
            }
            // Under the uniform rule p_idx carries no information and mirrors rho.
            if (space.power == PowerRule::Uniform && idx != action.rho(m, n)) {
                f.structure = false;
            }
        }
        for (int t = 0; t < types; ++t) {
            if (action.phi(m, t) > 1) {
                f.structure = false;
            }
        }
    }
    if (space.fixed_rho && !(*space.fixed_rho == action.rho)) {
        f.structure = false;
    }
    if (!f.structure) {
        return f;
    }

    f.quota = phy::check_subcarrier_quota(action.rho, space.quota);
    const Grid<double> power = resolve_powers(action, model, space);
    for (int m = 0; m < ues; ++m) {
        f.budget = f.budget && phy::check_power_budget(action.rho.row(m), power.row(m), model.radio.p_max_w);
        f.transmission = f.transmission &&
                         env::check_transmission_feasible(ctx.buffered.row(m), ctx.updates.row(m), action.phi.row(m));
    }
    if (f.transmission) {
        for (int m = 0; m < ues && f.buffer; ++m) {
            const Bits z = env::apply_buffer_update(ctx.buffered.row(m), ctx.updates.row(m), action.phi.row(m));
            double used = 0.0;
            for (int t = 0; t < types; ++t) {
                used += z[t] * model.info.packet_bits[t];
            }
            f.buffer = used <= model.info.buffer_bits;
        }
    }
    const Grid<double> gamma = phy::sinr(power, ctx.gains, action.rho, model.radio);
    const std::vector<double> rates = phy::user_rates(action.rho, gamma, model.radio.spacing_hz);
    for (int m = 0; m < ues; ++m) {
        f.rate = f.rate &&
                 phy::check_rate_coverage(action.phi.row(m), model.info.packet_bits, rates[m], model.info.slot_s);
    }
    f.cpu = phy::cpu_load(action.phi, model.info.packet_bits, model.compute, model.info.slot_s).feasible;
    return f;
}

std::uint64_t canonical_index(const ActionVector& action, int q)
{
    std::uint64_t rho_code = 0;
    for (auto bit : action.rho.flat()) {
        rho_code = rho_code * 2 + bit;
    }
    std::uint64_t p_code = 0;
    std::uint64_t p_span = 1;
    for (int idx : action.p_idx.flat()) {
        p_code = p_code * (q + 1) + static_cast<std::uint64_t>(idx);
        p_span *= static_cast<std::uint64_t>(q + 1);
    }
    std::uint64_t phi_code = 0;
    std::uint64_t phi_span = 1;
    for (auto bit : action.phi.flat()) {
        phi_code = phi_code * 2 + bit;
        phi_span *= 2;
    }
    return (rho_code * p_span + p_code) * phi_span + phi_code;
}

int radio_head_size(const SystemModel& model, PowerRule rule)
{
    const int base = rule == PowerRule::Uniform ? 2 : model.grid.q + 2;
    int size = 1;
    for (int n = 0; n < model.carriers(); ++n) {
        size *= base;
    }
    return size;
}

std::vector<RadioOption> radio_options(const SystemModel& model, const ActionSpace& space, int ue)
{
    const int carriers = model.carriers();
    const bool uniform = space.power == PowerRule::Uniform;
    // Per-subcarrier choice c: 0 is unassigned, c >= 1 is assigned at grid
    // level c - 1 (uniform rule: assigned).
    const int base = uniform ? 2 : model.grid.q + 2;
    const int combos = radio_head_size(model, space.power);
    std::vector<RadioOption> out;
    for (int code = 0; code < combos; ++code) {
        RadioOption opt;
        opt.head_index = code;
        opt.p_idx.assign(carriers, 0);
        opt.rho.assign(carriers, 0);
        opt.power_w.assign(carriers, 0.0);
        int rest = code;
        for (int n = carriers - 1; n >= 0; --n) {
            const int c = rest % base;
            rest /= base;
            opt.rho[n] = c > 0 ? 1 : 0;
            opt.p_idx[n] = uniform ? opt.rho[n] : std::max(c - 1, 0);
        }
        if (space.fixed_rho) {
            const auto fixed = space.fixed_rho->row(ue);
            if (!std::equal(fixed.begin(), fixed.end(), opt.rho.begin())) {
                continue;
            }
        }
        int assigned = 0;
        for (int n = 0; n < carriers; ++n) {
            assigned += opt.rho[n];
        }
        for (int n = 0; n < carriers; ++n) {
            if (opt.rho[n]) {
                opt.power_w[n] = uniform ? model.grid.p_max_w / assigned : model.grid.levels[opt.p_idx[n]];
            }
        }
        if (!phy::check_power_budget(opt.rho, opt.power_w, model.radio.p_max_w)) {
            continue;
        }
        out.push_back(std::move(opt));
    }
    return out;
}

std::vector<ActionVector> enumerate_feasible_actions(const DecisionContext& ctx, const SystemModel& model,
                                                     const ActionSpace& space)
{
    const int ues = model.ues;
    const int types = model.types();
    std::vector<std::vector<RadioOption>> radio(ues);
    std::vector<std::vector<unsigned>> phi_masks(ues);
    for (int m = 0; m < ues; ++m) {
        radio[m] = radio_options(model, space, m);
        unsigned avail = 0;
        for (int t = 0; t < types; ++t) {
            if (ctx.available(m, t)) {
                avail |= 1u << t;
            }
        }
        // Every subset of the available packets.
        for (unsigned sub = avail;; sub = (sub - 1) & avail) {
            phi_masks[m].push_back(sub);
            if (sub == 0) {
                break;
            }
        }
    }

    std::vector<ActionVector> out;
    ActionVector action = ActionVector::idle(ues, model.carriers(), types);
    std::vector<std::size_t> radio_pick(ues, 0);
    std::vector<std::size_t> phi_pick(ues, 0);

    auto recurse = [&](auto&& self, int m, bool choosing_phi) -> void {
        if (m == ues) {
            if (!choosing_phi) {
                self(self, 0, true);
            } else if (is_feasible(action, ctx, model, space)) {
                out.push_back(action);
            }
            return;
        }
        if (!choosing_phi) {
            for (const auto& opt : radio[m]) {
                for (int n = 0; n < model.carriers(); ++n) {
                    action.rho(m, n) = opt.rho[n];
                    action.p_idx(m, n) = opt.p_idx[n];
                }
                if (phy::check_subcarrier_quota(action.rho, space.quota) || m + 1 < ues) {
                    self(self, m + 1, false);
                }
            }
        } else {
            for (unsigned mask : phi_masks[m]) {
                for (int t = 0; t < types; ++t) {
                    action.phi(m, t) = static_cast<std::uint8_t>((mask >> t) & 1u);
                }
                self(self, m + 1, true);
            }
        }
    };
    recurse(recurse, 0, false);

    const int q = model.grid.q;
    std::sort(out.begin(), out.end(), [q](const ActionVector& a, const ActionVector& b) {
        return canonical_index(a, q) < canonical_index(b, q);
    });
    return out;
}

double reward(std::span<const double> rates_bps, const Grid<double>& power_w, double aaoi_s, double circuit_w)
{
    expects(aaoi_s > 0.0, "reward needs a positive average AoI");
    double r_total = 0.0;
    for (double r : rates_bps) {
        r_total += r;
    }
    double p_total = 0.0;
    for (int m = 0; m < power_w.rows(); ++m) {
        for (double p : power_w.row(m)) {
            p_total += p;
        }
        p_total += circuit_w;
    }
    return r_total / (aaoi_s * p_total);
}

double discounted_return(std::span<const double> rewards, double gamma)
{
    expects(gamma >= 0.0 && gamma < 1.0, "discount must lie in [0, 1)");
    if (rewards.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    double weight = gamma;
    for (double r : rewards) {
        sum += weight * r;
        weight *= gamma;
    }
    return sum / static_cast<double>(rewards.size());
}

AoiConstraintTracker::AoiConstraintTracker(int entries, ConstraintConfig cfg)
    : cfg_(cfg), ema_(entries, 0.0)
{
    expects(cfg.kappa_s > 0.0, "AoI bound must be positive");
    expects(cfg.window_slots >= 1, "constraint window must be >= 1");
}

void AoiConstraintTracker::observe(std::span<const double> aoi_s)
{
    const double beta = 1.0 - 1.0 / cfg_.window_slots;
    for (std::size_t i = 0; i < ema_.size(); ++i) {
        ema_[i] = beta * ema_[i] + (1.0 - beta) * aoi_s[i];
    }
    decay_pow_ *= beta;
}

double AoiConstraintTracker::running_mean(int entry) const
{
    const double correction = 1.0 - decay_pow_;
    return correction > 0.0 ? ema_.at(entry) / correction : 0.0;
}

double AoiConstraintTracker::excess() const
{
    if (ema_.empty() || decay_pow_ == 1.0) {
        return 0.0;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < ema_.size(); ++i) {
        sum += std::max(0.0, running_mean(static_cast<int>(i)) - cfg_.kappa_s) / cfg_.kappa_s;
    }
    return sum / static_cast<double>(ema_.size());
}

void EnvConfig::validate() const
{
    if (ues < 1) {
        throw std::invalid_argument("ue_count must be >= 1");
    }
    info.validate();
    channel.validate();
    radio.validate();
    compute.validate();
    if (power_levels < 1) {
        throw std::invalid_argument("power_levels must be >= 1");
    }
    if (!(constraint.kappa_s > 0.0)) {
        throw std::invalid_argument("kappa_min must be positive");
    }
    if (constraint.penalty_weight < 0.0) {
        throw std::invalid_argument("penalty_weight must be non-negative");
    }
    if (constraint.window_slots < 1) {
        throw std::invalid_argument("constraint_window must be >= 1");
    }
}

SystemModel EnvConfig::model() const
{
    return {ues, info, radio, compute, build_power_grid(radio.p_max_w, power_levels)};
}

int state_dim(const EnvConfig& cfg)
{
    const int m = cfg.ues;
    const int n = cfg.radio.subcarriers;
    const int f = cfg.info.types;
    return m * n + m * f + m + m * f + m * f;
}

NomaEnv::NomaEnv(const EnvConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      model_(cfg.model()),
      traffic_rng_(make_stream(seed, Stream::Traffic)),
      fading_rng_(make_stream(seed, Stream::Fading)),
      mobility_rng_(make_stream(seed, Stream::Mobility)),
      tracker_(cfg.ues * cfg.info.types, cfg.constraint)
{
    cfg_.validate();
    Rng placement = make_stream(seed, Stream::Placement);
    for (int m = 0; m < cfg_.ues; ++m) {
        positions_.push_back(channel::place_ue(placement, cfg_.channel.cell_radius_m, cfg_.channel.d0_m));
    }
    reset();
}

void NomaEnv::draw_channels()
{
    const auto& ch = cfg_.channel;
    levels_ = Grid<int>(cfg_.ues, cfg_.radio.subcarriers, 1);
    ctx_.gains = Grid<double>(cfg_.ues, cfg_.radio.subcarriers, 0.0);
    for (int m = 0; m < cfg_.ues; ++m) {
        const double pathloss = channel::channel_gain(1.0, positions_[m].distance(), ch.d0_m, ch.pathloss_exp);
        const auto quantizer = channel::Quantizer::build(ch.levels, ch.fading_variance, pathloss);
        for (int n = 0; n < cfg_.radio.subcarriers; ++n) {
            const double fading = channel::sample_fading(fading_rng_, ch.fading_variance);
            const auto state = channel::quantize_gain(fading * pathloss, quantizer);
            levels_(m, n) = state.level;
            ctx_.gains(m, n) = state.gain;
        }
    }
}

void NomaEnv::draw_traffic()
{
    pending_ = {};
    for (int m = 0; m < cfg_.ues; ++m) {
        auto& ue = ues_[m];
        const Bits raw = env::generate_updates(traffic_rng_, cfg_.info.types);
        ue.updates = env::admit_updates(ue.buffered, raw, cfg_.info.packet_bits, cfg_.info.buffer_bits);
        for (int f = 0; f < cfg_.info.types; ++f) {
            pending_.generated += raw[f];
            ctx_.buffered(m, f) = ue.buffered[f];
            ctx_.updates(m, f) = ue.updates[f];
        }
    }
}

void NomaEnv::reset()
{
    ues_.assign(cfg_.ues, env::UeState::initial(cfg_.info));
    ctx_.buffered = Grid<std::uint8_t>(cfg_.ues, cfg_.info.types, 0);
    ctx_.updates = Grid<std::uint8_t>(cfg_.ues, cfg_.info.types, 0);
    slot_ = 0;
    draw_channels();
    draw_traffic();
}

int NomaEnv::state_dim() const { return mdp::state_dim(cfg_); }

std::vector<double> NomaEnv::encode() const
{
    const int ues = cfg_.ues;
    const int carriers = cfg_.radio.subcarriers;
    const int types = cfg_.info.types;
    std::vector<double> s;
    s.reserve(state_dim());
    for (int m = 0; m < ues; ++m) {
        for (int n = 0; n < carriers; ++n) {
            s.push_back(static_cast<double>(levels_(m, n)) / cfg_.channel.levels);
        }
    }
    for (const auto& ue : ues_) {
        for (int f = 0; f < types; ++f) {
            s.push_back(ue.updates[f]);
        }
    }
    for (const auto& ue : ues_) {
        s.push_back(ue.free_bits / cfg_.info.buffer_bits);
    }
    for (const auto& ue : ues_) {
        for (int f = 0; f < types; ++f) {
            s.push_back(ue.buffered[f]);
        }
    }
    const double cap = cfg_.info.max_aoi_s();
    for (const auto& ue : ues_) {
        for (int f = 0; f < types; ++f) {
            s.push_back(ue.aoi_s[f] / cap);
        }
    }
    return s;
}

StepResult NomaEnv::step(const ActionVector& action, const ActionSpace& space)
{
    const Feasibility feas = check_action(action, ctx_, model_, space);
    expects(feas.ok(), "step: infeasible action");

    const Grid<double> power = resolve_powers(action, model_, space);
    const Grid<double> gamma = phy::sinr(power, ctx_.gains, action.rho, model_.radio);
    const std::vector<double> rates = phy::user_rates(action.rho, gamma, model_.radio.spacing_hz);

    StepMetrics metrics;
    metrics.packets = pending_;
    std::vector<double> all_aoi;
    all_aoi.reserve(static_cast<std::size_t>(cfg_.ues) * cfg_.info.types);
    for (int m = 0; m < cfg_.ues; ++m) {
        env::advance(ues_[m], action.phi.row(m), slot_, cfg_.info);
        for (int f = 0; f < cfg_.info.types; ++f) {
            metrics.packets.transmitted += action.phi(m, f);
            all_aoi.push_back(ues_[m].aoi_s[f]);
        }
    }
    metrics.aaoi_s = env::average_aoi(all_aoi);
    metrics.reward_raw = reward(rates, power, metrics.aaoi_s, cfg_.radio.circuit_w);
    for (double r : rates) {
        metrics.r_total_bps += r;
    }
    for (int m = 0; m < cfg_.ues; ++m) {
        for (double p : power.row(m)) {
            metrics.p_total_w += p;
        }
        metrics.p_total_w += cfg_.radio.circuit_w;
    }
    metrics.ee_bits_per_joule_per_hz = metrics.r_total_bps / metrics.p_total_w / cfg_.radio.spacing_hz;
    const auto load = phy::cpu_load(action.phi, cfg_.info.packet_bits, cfg_.compute, cfg_.info.slot_s);
    metrics.cpu_hz = load.cycles_per_s;
    metrics.cpu_energy_j = phy::cpu_energy(load.cycles_per_s, cfg_.compute.capacitance, cfg_.info.slot_s);

    tracker_.observe(all_aoi);
    reward_scale_ = std::max(reward_scale_, metrics.reward_raw);
    metrics.penalty = tracker_.excess();
    metrics.reward_penalized =
        metrics.reward_raw - cfg_.constraint.penalty_weight * metrics.penalty * reward_scale_;

    ++slot_;
    for (auto& pos : positions_) {
        pos = channel::move_ue(pos, cfg_.channel.speed_mps, cfg_.info.slot_s, mobility_rng_,
                               cfg_.channel.cell_radius_m);
    }
    draw_channels();
    draw_traffic();
    return {encode(), metrics};
}

}  // namespace aoinoma::mdp
