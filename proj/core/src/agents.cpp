#include "aoinoma/agents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aoinoma::agents {

double QTable::get(const StateKey& s, ActionIndex a) const
{
    auto it = values_.find({s, a});
    return it == values_.end() ? 0.0 : it->second;
}

void QTable::set(const StateKey& s, ActionIndex a, double value)
{
    expects(std::isfinite(value), "Q-table entries must stay finite");
    values_[{s, a}] = value;
}

long QTable::visits(const StateKey& s, ActionIndex a) const
{
    auto it = visits_.find({s, a});
    return it == visits_.end() ? 0 : it->second;
}

void QTable::count_visit(const StateKey& s, ActionIndex a) { ++visits_[{s, a}]; }

double QTable::max_over(const StateKey& s, std::span<const ActionIndex> actions) const
{
    expects(!actions.empty(), "max over an empty action set");
    double best = -std::numeric_limits<double>::infinity();
    for (ActionIndex a : actions) {
        best = std::max(best, get(s, a));
    }
    return best;
}

void ExplorationSchedule::validate() const
{
    if (!(eps0 >= 0.0 && eps0 <= 1.0)) {
        throw std::invalid_argument("eps0 must lie in [0, 1]");
    }
    if (!(eps_min >= 0.0 && eps_min <= 1.0)) {
        throw std::invalid_argument("eps_min must lie in [0, 1]");
    }
    if (eps_dec < 0.0) {
        throw std::invalid_argument("eps_dec must be non-negative");
    }
}

double decay_epsilon(const ExplorationSchedule& schedule, long t)
{
    expects(t >= 0, "epsilon schedule needs t >= 0");
    const double td = static_cast<double>(t);
    const double eps = schedule.mode == DecayMode::Linear ? schedule.eps0 - td * schedule.eps_dec
                                                          : schedule.eps0 * std::exp(-schedule.eps_dec * td);
    return std::max(schedule.eps_min, eps);
}

double LearningRateSchedule::rate(long n) const
{
    if (mode == RateMode::Constant) {
        return zeta0;
    }
    return zeta0 / std::pow(1.0 + static_cast<double>(n), omega);
}

double q_update(QTable& q, const StateKey& s, ActionIndex a, double reward, const StateKey& s_next,
                std::span<const ActionIndex> next_actions, double zeta, double gamma)
{
    expects(zeta >= 0.0 && zeta < 1.0, "learning rate must lie in [0, 1)");
    expects(gamma >= 0.0 && gamma < 1.0, "discount must lie in [0, 1)");
    const double current = q.get(s, a);
    const double target = reward + gamma * q.max_over(s_next, next_actions);
    const double updated = current + zeta * (target - current);
    q.set(s, a, updated);
    return updated;
}

ActionIndex select_action(const QTable& q, const StateKey& s, std::span<const ActionIndex> actions, double epsilon,
                          Rng& rng)
{
    expects(!actions.empty(), "select_action needs a non-empty feasible set");
    if (uniform01(rng) < epsilon) {
        return actions[uniform_index(rng, static_cast<int>(actions.size()))];
    }
    ActionIndex best = actions.front();
    double best_q = q.get(s, best);
    for (ActionIndex a : actions) {
        const double value = q.get(s, a);
        if (value > best_q || (value == best_q && a < best)) {
            best = a;
            best_q = value;
        }
    }
    return best;
}

StateKey state_key(const mdp::NomaEnv& env)
{
    const auto& cfg = env.config();
    StateKey key;
    for (int level : env.levels().flat()) {
        key.push_back(level);
    }
    const double smallest = *std::min_element(cfg.info.packet_bits.begin(), cfg.info.packet_bits.end());
    for (const auto& ue : env.ues()) {
        for (auto x : ue.updates) {
            key.push_back(x);
        }
        for (auto z : ue.buffered) {
            key.push_back(z);
        }
        for (double aoi : ue.aoi_s) {
            key.push_back(std::min(cfg.info.theta_cap_slots, static_cast<int>(std::lround(aoi / cfg.info.slot_s))));
        }
        key.push_back(static_cast<int>(std::floor(ue.free_bits / smallest)));
    }
    return key;
}

TabularAgent::TabularAgent(ExplorationSchedule exploration, LearningRateSchedule rate, double gamma)
    : exploration_(exploration), rate_(rate), gamma_(gamma)
{
    exploration_.validate();
    expects(gamma >= 0.0 && gamma < 1.0, "discount must lie in [0, 1)");
}

ActionIndex TabularAgent::act(const StateKey& s, std::span<const ActionIndex> actions, Rng& rng)
{
    return select_action(q_, s, actions, epsilon(), rng);
}

void TabularAgent::learn(const StateKey& s, ActionIndex a, double reward, const StateKey& s_next,
                         std::span<const ActionIndex> next_actions)
{
    const double zeta = rate_.rate(q_.visits(s, a));
    q_update(q_, s, a, reward, s_next, next_actions, std::min(zeta, std::nextafter(1.0, 0.0)), gamma_);
    q_.count_visit(s, a);
    ++steps_;
}

}  // namespace aoinoma::agents
