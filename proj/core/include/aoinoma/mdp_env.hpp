#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aoinoma/channel.hpp"
#include "aoinoma/common.hpp"
#include "aoinoma/env_core.hpp"
#include "aoinoma/phy_noma.hpp"

// The scheduling MDP: power grid, joint actions and their feasibility,
// reward, state encoding and the one-slot transition.
namespace aoinoma::mdp {

/// Discrete transmit powers {0, D, 2D, ..., qD} with D = P_max / (q + 1).
struct PowerGrid {
    double p_max_w = 0.0;
    int q = 1;
    double step_w = 0.0;
    std::vector<double> levels;
};

PowerGrid build_power_grid(double p_max_w, int q);

struct ActionVector {
    Grid<std::uint8_t> rho;  ///< M x N subcarrier assignment
    Grid<int> p_idx;         ///< M x N index into the power grid
    Grid<std::uint8_t> phi;  ///< M x F packet transmission

    static ActionVector idle(int ues, int carriers, int types);
    bool operator==(const ActionVector&) const = default;
};

enum class PowerRule {
    Grid,     ///< p = grid level p_idx
    Uniform,  ///< P_max split evenly over the assigned subcarriers
};

/// The joint actions a scheme may take.
struct ActionSpace {
    int quota = 2;
    PowerRule power = PowerRule::Grid;
    /// Assignment imposed from outside the learner for this slot.
    std::optional<Grid<std::uint8_t>> fixed_rho;
};

struct SystemModel {
    int ues = 3;
    env::InfoConfig info;
    phy::RadioConfig radio;
    phy::ComputeConfig compute;
    PowerGrid grid;

    int carriers() const { return radio.subcarriers; }
    int types() const { return info.types; }
};

/// Everything a scheduler needs to decide feasibility in the current slot.
struct DecisionContext {
    Grid<double> gains;              ///< representative |h|^2 per (UE, subcarrier)
    Grid<std::uint8_t> buffered;     ///< z(t-1)
    Grid<std::uint8_t> updates;      ///< admitted x(t)

    bool available(int ue, int type) const { return (buffered(ue, type) | updates(ue, type)) != 0; }
};

struct Feasibility {
    bool structure = true;     ///< shapes, p_idx range, p_idx > 0 only where assigned
    bool quota = true;         ///< per-subcarrier NOMA quota
    bool budget = true;        ///< per-UE power budget
    bool transmission = true;  ///< only existing packets are sent
    bool buffer = true;        ///< free buffer stays non-negative
    bool rate = true;          ///< rate covers the scheduled bits
    bool cpu = true;           ///< server cycle capacity

    bool ok() const { return structure && quota && budget && transmission && buffer && rate && cpu; }
};

Grid<double> resolve_powers(const ActionVector& action, const SystemModel& model, const ActionSpace& space);

Feasibility check_action(const ActionVector& action, const DecisionContext& ctx, const SystemModel& model,
                         const ActionSpace& space);

inline bool is_feasible(const ActionVector& action, const DecisionContext& ctx, const SystemModel& model,
                        const ActionSpace& space)
{
    return check_action(action, ctx, model, space).ok();
}

/// Position of an action in the lexicographic order over (rho, p_idx, phi),
/// each flattened row-major.
std::uint64_t canonical_index(const ActionVector& action, int q);

/// One UE's radio choice: a power index per subcarrier plus what it implies.
struct RadioOption {
    std::vector<int> p_idx;
    Bits rho;
    std::vector<double> power_w;
    /// Per-subcarrier choice (0 unassigned, 1 + p_idx assigned; uniform
    /// rule: rho) read as one number, most significant subcarrier first.
    int head_index = 0;
};

/// Number of distinct radio options of one UE before any filtering.
int radio_head_size(const SystemModel& model, PowerRule rule);

/// Budget-feasible radio options of one UE under the space's power rule and
/// any imposed assignment, in head_index order.
std::vector<RadioOption> radio_options(const SystemModel& model, const ActionSpace& space, int ue);

/// All feasible joint actions in canonical order. The idle action is always
/// present. Exponential in M, N and F; meant for small instances.
std::vector<ActionVector> enumerate_feasible_actions(const DecisionContext& ctx, const SystemModel& model,
                                                     const ActionSpace& space);

/// Phi = R_total / (AAoI * P_total), P_total counting circuit power per UE.
double reward(std::span<const double> rates_bps, const Grid<double>& power_w, double aaoi_s, double circuit_w);

/// (1/T) sum_{t=1..T} gamma^t Phi(t).
double discounted_return(std::span<const double> rewards, double gamma);

struct ConstraintConfig {
    double kappa_s = 0.2;
    double penalty_weight = 1.0;
    /// Horizon of the exponentially weighted running mean of each AoI.
    int window_slots = 1000;
};

/// Running mean of every AoI and the relative excess over its bound.
class AoiConstraintTracker {
public:
    AoiConstraintTracker() = default;
    AoiConstraintTracker(int entries, ConstraintConfig cfg);

    void observe(std::span<const double> aoi_s);
    /// mean over entries of max(0, running_mean - kappa) / kappa
    double excess() const;
    double running_mean(int entry) const;

private:
    ConstraintConfig cfg_;
    std::vector<double> ema_;
    double decay_pow_ = 1.0;
};

struct EnvConfig {
    int ues = 3;
    env::InfoConfig info;
    channel::ChannelConfig channel;
    phy::RadioConfig radio;
    phy::ComputeConfig compute;
    ConstraintConfig constraint;
    int power_levels = 4;

    void validate() const;
    SystemModel model() const;
};

struct StepMetrics {
    double reward_raw = 0.0;
    double reward_penalized = 0.0;
    double penalty = 0.0;  ///< relative AoI-bound excess before weighting
    double r_total_bps = 0.0;
    double p_total_w = 0.0;
    double aaoi_s = 0.0;
    double ee_bits_per_joule_per_hz = 0.0;
    double cpu_hz = 0.0;
    double cpu_energy_j = 0.0;
    env::PacketCounters packets;
};

struct StepResult {
    std::vector<double> next_state;
    StepMetrics metrics;
};

/// One NOMA cell. Owns its random streams; two instances built from the same
/// config and seed produce identical trajectories under identical actions.
class NomaEnv {
public:
    NomaEnv(const EnvConfig& cfg, std::uint64_t seed);

    /// Starts an episode: empty buffers, saturated AoI, fresh traffic and
    /// fading. UE positions persist across episodes.
    void reset();

    StepResult step(const ActionVector& action, const ActionSpace& space);

    std::vector<double> encode() const;
    int state_dim() const;

    const EnvConfig& config() const { return cfg_; }
    const SystemModel& model() const { return model_; }
    const DecisionContext& context() const { return ctx_; }
    const Grid<int>& levels() const { return levels_; }
    const std::vector<env::UeState>& ues() const { return ues_; }
    const std::vector<channel::Position>& positions() const { return positions_; }
    long slot() const { return slot_; }
    /// Running maximum of the raw reward; the penalty is expressed in these units.
    double reward_scale() const { return reward_scale_; }

private:
    void draw_channels();
    void draw_traffic();

    EnvConfig cfg_;
    SystemModel model_;
    Rng traffic_rng_;
    Rng fading_rng_;
    Rng mobility_rng_;
    std::vector<env::UeState> ues_;
    std::vector<channel::Position> positions_;
    Grid<int> levels_;
    DecisionContext ctx_;
    AoiConstraintTracker tracker_;
    long slot_ = 0;
    double reward_scale_ = 0.0;
    env::PacketCounters pending_;  ///< generations of the current slot
};

int state_dim(const EnvConfig& cfg);

}  // namespace aoinoma::mdp
