#pragma once

#include <cstdint>
#include <vector>

#include "aoinoma/common.hpp"
#include "aoinoma/dqn/heads.hpp"
#include "aoinoma/mdp_env.hpp"

namespace aoinoma::dqn {

struct Transition {
    std::vector<double> state;
    FactoredAction action;
    double reward = 0.0;
    std::vector<double> next_state;
    /// What the bootstrap max needs to mask infeasible next actions.
    mdp::DecisionContext next_ctx;
    mdp::ActionSpace next_space;
};

/// Fixed-capacity ring; once full, each push overwrites the oldest record.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(Transition t);
    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    const Transition& at(std::size_t i) const { return items_.at(i); }
    /// Total pushes so far; the slot written by push number k is k mod capacity.
    std::uint64_t pushes() const { return pushes_; }

private:
    std::size_t capacity_;
    std::vector<Transition> items_;
    std::uint64_t pushes_ = 0;
};

/// `batch` distinct slot indices, uniform without replacement (partial
/// Fisher-Yates). Requires size() >= batch.
std::vector<std::size_t> sample_minibatch(const ReplayMemory& memory, std::size_t batch, Rng& rng);

}  // namespace aoinoma::dqn
