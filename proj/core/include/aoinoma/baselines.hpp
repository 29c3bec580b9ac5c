#pragma once

#include <string>
#include <vector>

#include "aoinoma/common.hpp"
#include "aoinoma/mdp_env.hpp"

// Comparison schemes. Each one replaces a single decision dimension of the
// learned scheduler and leaves the rest to the DQN.
namespace aoinoma::baselines {

enum class Scheme {
    Proposed,
    Oma,           ///< exclusive subcarrier occupancy
    Matching,      ///< assignment from deferred acceptance
    UniformPower,  ///< P_max split evenly over assigned subcarriers
    RandomPhi,     ///< packets picked uniformly among feasible sets
};

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme scheme);
const std::vector<Scheme>& all_schemes();

/// Which dimensions the DQN decides under a scheme.
struct SchemeFlags {
    bool dqn_rho = true;
    bool dqn_p = true;
    bool dqn_phi = true;
};

SchemeFlags scheme_flags(Scheme scheme);

mdp::ActionSpace oma_restrict(mdp::ActionSpace space);

struct MatchResult {
    Grid<std::uint8_t> rho;
    long proposals = 0;
};

/// User-proposing deferred acceptance. Users rank subcarriers by their own
/// gain (ties: lower subcarrier index); a subcarrier keeps its `quota`
/// strongest proposers (ties: lower user index). Users hold at most
/// `user_capacity` subcarriers.
MatchResult match_subcarriers(const Grid<double>& gains, int quota, int user_capacity);

std::vector<double> uniform_power(std::span<const std::uint8_t> rho_row, double p_max_w);

/// Draws phi uniformly from the transmission vectors that make (rho, p_idx,
/// phi) feasible in the current slot.
Grid<std::uint8_t> random_transmission(const mdp::DecisionContext& ctx, const mdp::SystemModel& model,
                                       const mdp::ActionSpace& space, const Grid<std::uint8_t>& rho,
                                       const Grid<int>& p_idx, Rng& rng);

/// Action space the learner searches under `scheme` in the current slot.
mdp::ActionSpace action_space_for(Scheme scheme, const mdp::DecisionContext& ctx, const mdp::SystemModel& model,
                                  int matching_capacity);

}  // namespace aoinoma::baselines
