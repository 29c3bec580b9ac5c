#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aoinoma/common.hpp"
#include "aoinoma/mdp_env.hpp"

// Factored Q output. The network emits, per UE, one value per radio option
// (power index on every subcarrier) and one per transmission subset; the
// joint action value is the sum of the selected entries.
namespace aoinoma::dqn {

struct FactoredAction {
    std::vector<int> radio;     ///< radio head index per UE
    std::vector<unsigned> phi;  ///< transmitted-type bitmask per UE

    bool operator==(const FactoredAction&) const = default;
};

class ActionHeads {
public:
    /// `learn_phi` false drops the transmission heads; phi is then decided
    /// outside the network.
    ActionHeads(const mdp::SystemModel& model, mdp::PowerRule rule, bool learn_phi);

    int output_dim() const { return model_.ues * (radio_size_ + phi_size_); }
    int radio_size() const { return radio_size_; }
    int phi_size() const { return phi_size_; }
    int radio_offset(int ue) const { return ue * (radio_size_ + phi_size_); }
    int phi_offset(int ue) const { return radio_offset(ue) + radio_size_; }
    bool learns_phi() const { return learn_phi_; }
    mdp::PowerRule rule() const { return rule_; }
    const mdp::SystemModel& model() const { return model_; }

    /// Output indices that make up Q(s, a).
    std::vector<int> selected_outputs(const FactoredAction& action) const;
    double joint_q(std::span<const double> q, const FactoredAction& action) const;

    mdp::ActionVector to_action(const FactoredAction& action) const;
    FactoredAction from_action(const mdp::ActionVector& action) const;

    struct Choice {
        FactoredAction action;
        double value = 0.0;
    };

    /// Exact maximizer of joint_q over the feasible set (branch and bound).
    /// Ties resolve deterministically.
    Choice greedy(std::span<const double> q, const mdp::DecisionContext& ctx, const mdp::ActionSpace& space) const;

    /// Uniform draw over the feasible set.
    FactoredAction explore(const mdp::DecisionContext& ctx, const mdp::ActionSpace& space, Rng& rng) const;

private:
    std::vector<const mdp::RadioOption*> candidates(int ue, const mdp::ActionSpace& space) const;
    unsigned available_mask(const mdp::DecisionContext& ctx, int ue) const;
    double mask_bits(unsigned mask) const;
    std::vector<double> rates_for(const std::vector<const mdp::RadioOption*>& picks,
                                  const mdp::DecisionContext& ctx) const;
    bool rate_ok(unsigned mask, double rate) const;
    bool cpu_ok(double bits) const;

    mdp::SystemModel model_;
    mdp::PowerRule rule_;
    bool learn_phi_;
    int radio_size_ = 0;
    int phi_size_ = 0;
    std::vector<std::optional<mdp::RadioOption>> catalog_;
};

}  // namespace aoinoma::dqn
