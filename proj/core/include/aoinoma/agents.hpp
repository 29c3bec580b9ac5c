#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "aoinoma/common.hpp"
#include "aoinoma/mdp_env.hpp"

// Tabular Q-learning with epsilon-greedy exploration. Only viable on tiny
// instances; serves as a reference for the DQN.
namespace aoinoma::agents {

using StateKey = std::vector<int>;
using ActionIndex = std::uint64_t;

/// Q-values keyed by (state, action); unvisited pairs read as zero.
class QTable {
public:
    double get(const StateKey& s, ActionIndex a) const;
    void set(const StateKey& s, ActionIndex a, double value);
    /// Number of updates applied to (s, a) so far.
    long visits(const StateKey& s, ActionIndex a) const;
    void count_visit(const StateKey& s, ActionIndex a);
    double max_over(const StateKey& s, std::span<const ActionIndex> actions) const;
    std::size_t size() const { return values_.size(); }

private:
    std::map<std::pair<StateKey, ActionIndex>, double> values_;
    std::map<std::pair<StateKey, ActionIndex>, long> visits_;
};

enum class DecayMode { Linear, Exponential };

struct ExplorationSchedule {
    double eps0 = 0.9;
    double eps_dec = 1e-4;  ///< per-step decrement, or rate lambda in exponential mode
    double eps_min = 1e-4;
    DecayMode mode = DecayMode::Linear;

    void validate() const;
};

/// Linear: max(eps_min, eps0 - t * eps_dec). Exponential: max(eps_min, eps0 * exp(-eps_dec * t)).
double decay_epsilon(const ExplorationSchedule& schedule, long t);

enum class RateMode { Constant, RobbinsMonro };

struct LearningRateSchedule {
    RateMode mode = RateMode::RobbinsMonro;
    double zeta0 = 0.01;
    /// Exponent of the decay; any value in (0.5, 1] keeps sum(zeta) infinite
    /// and sum(zeta^2) finite.
    double omega = 1.0;

    /// Rate for the n-th update of a pair (n counted from 0).
    double rate(long n) const;
};

/// Q(s,a) += zeta * (reward + gamma * max_{a'} Q(s',a') - Q(s,a)); returns the new value.
double q_update(QTable& q, const StateKey& s, ActionIndex a, double reward, const StateKey& s_next,
                std::span<const ActionIndex> next_actions, double zeta, double gamma);

/// Epsilon-greedy over `actions`; greedy ties go to the lowest action index.
ActionIndex select_action(const QTable& q, const StateKey& s, std::span<const ActionIndex> actions, double epsilon,
                          Rng& rng);

/// Discrete key of the environment state: channel levels, x, z, AoI in
/// slots (capped) and free buffer in whole smallest-packet units.
StateKey state_key(const mdp::NomaEnv& env);

class TabularAgent {
public:
    TabularAgent(ExplorationSchedule exploration, LearningRateSchedule rate, double gamma);

    ActionIndex act(const StateKey& s, std::span<const ActionIndex> actions, Rng& rng);
    void learn(const StateKey& s, ActionIndex a, double reward, const StateKey& s_next,
               std::span<const ActionIndex> next_actions);

    const QTable& table() const { return q_; }
    double epsilon() const { return decay_epsilon(exploration_, steps_); }
    long steps() const { return steps_; }

private:
    ExplorationSchedule exploration_;
    LearningRateSchedule rate_;
    double gamma_;
    QTable q_;
    long steps_ = 0;
};

}  // namespace aoinoma::agents
