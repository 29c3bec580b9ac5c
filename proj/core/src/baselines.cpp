#include "aoinoma/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace aoinoma::baselines {

namespace {

const std::vector<std::pair<Scheme, std::string>>& scheme_names()
{
    static const std::vector<std::pair<Scheme, std::string>> names{
        {Scheme::Proposed, "proposed"},
        {Scheme::Oma, "oma"},
        {Scheme::Matching, "matching"},
        {Scheme::UniformPower, "uniform-power"},
        {Scheme::RandomPhi, "random-phi"},
    };
    return names;
}

// Subcarrier n ranks user a above user b.
bool outranks(const Grid<double>& gains, int n, int a, int b)
{
    return gains(a, n) > gains(b, n) || (gains(a, n) == gains(b, n) && a < b);
}

}  // namespace

Scheme parse_scheme(const std::string& name)
{
    for (const auto& [scheme, label] : scheme_names()) {
        if (label == name) {
            return scheme;
        }
    }
    throw std::invalid_argument("unknown scheme '" + name +
                                "' (expected proposed, oma, matching, uniform-power or random-phi)");
}

std::string to_string(Scheme scheme)
{
    for (const auto& [s, label] : scheme_names()) {
        if (s == scheme) {
            return label;
        }
    }
    return "unknown";
}

const std::vector<Scheme>& all_schemes()
{
    static const std::vector<Scheme> schemes{Scheme::Proposed, Scheme::Oma, Scheme::Matching, Scheme::UniformPower,
                                             Scheme::RandomPhi};
    return schemes;
}

SchemeFlags scheme_flags(Scheme scheme)
{
    switch (scheme) {
    case Scheme::Matching:
        return {false, true, true};
    case Scheme::UniformPower:
        return {true, false, true};
    case Scheme::RandomPhi:
        return {true, true, false};
    default:
        return {};
    }
}

mdp::ActionSpace oma_restrict(mdp::ActionSpace space)
{
    space.quota = 1;
    return space;
}

MatchResult match_subcarriers(const Grid<double>& gains, int quota, int user_capacity)
{
    expects(quota >= 1 && user_capacity >= 1, "matching needs positive quotas");
    const int users = gains.rows();
    const int carriers = gains.cols();
    for (double g : gains.flat()) {
        expects(std::isfinite(g), "matching needs finite gains");
    }

    std::vector<std::vector<int>> prefs(users);
    for (int m = 0; m < users; ++m) {
        prefs[m].resize(carriers);
        std::iota(prefs[m].begin(), prefs[m].end(), 0);
        std::stable_sort(prefs[m].begin(), prefs[m].end(),
                         [&](int a, int b) { return gains(m, a) > gains(m, b); });
    }

    MatchResult result{Grid<std::uint8_t>(users, carriers, 0), 0};
    std::vector<int> cursor(users, 0);
    std::vector<int> held(users, 0);
    std::vector<std::vector<int>> accepted(carriers);

    bool active = true;
    while (active) {
        active = false;
        for (int m = 0; m < users; ++m) {
            while (held[m] < user_capacity && cursor[m] < carriers) {
                const int n = prefs[m][cursor[m]++];
                ++result.proposals;
                active = true;
                auto& pool = accepted[n];
                pool.push_back(m);
                ++held[m];
                result.rho(m, n) = 1;
                if (static_cast<int>(pool.size()) > quota) {
                    auto worst = std::min_element(pool.begin(), pool.end(),
                                                  [&](int a, int b) { return outranks(gains, n, b, a); });
                    const int loser = *worst;
                    pool.erase(worst);
                    --held[loser];
                    result.rho(loser, n) = 0;
                }
            }
        }
    }
    return result;
}

std::vector<double> uniform_power(std::span<const std::uint8_t> rho_row, double p_max_w)
{
    const auto k = std::count_if(rho_row.begin(), rho_row.end(), [](std::uint8_t r) { return r != 0; });
    std::vector<double> power(rho_row.size(), 0.0);
    for (std::size_t n = 0; n < rho_row.size(); ++n) {
        if (rho_row[n]) {
            power[n] = p_max_w / static_cast<double>(k);
        }
    }
    return power;
}

Grid<std::uint8_t> random_transmission(const mdp::DecisionContext& ctx, const mdp::SystemModel& model,
                                       const mdp::ActionSpace& space, const Grid<std::uint8_t>& rho,
                                       const Grid<int>& p_idx, Rng& rng)
{
    const int ues = model.ues;
    const int types = model.types();
    mdp::ActionVector action{rho, p_idx, Grid<std::uint8_t>(ues, types, 0)};
    const Grid<double> power = mdp::resolve_powers(action, model, space);
    const Grid<double> gamma = phy::sinr(power, ctx.gains, rho, model.radio);
    const std::vector<double> rates = phy::user_rates(rho, gamma, model.radio.spacing_hz);

    // Per-UE subsets of the available packets that the UE's rate can carry.
    // Only the server capacity couples UEs, so a uniform draw from the product
    // followed by rejection on that coupling is uniform over the joint set.
    std::vector<std::vector<unsigned>> options(ues);
    Bits phi_row(types);
    for (int m = 0; m < ues; ++m) {
        unsigned avail = 0;
        for (int f = 0; f < types; ++f) {
            if (ctx.available(m, f)) {
                avail |= 1u << f;
            }
        }
        for (unsigned sub = 0; sub <= avail; ++sub) {
            if ((sub & ~avail) != 0) {
                continue;
            }
            for (int f = 0; f < types; ++f) {
                phi_row[f] = (sub >> f) & 1u;
            }
            if (phy::check_rate_coverage(phi_row, model.info.packet_bits, rates[m], model.info.slot_s)) {
                options[m].push_back(sub);
            }
        }
    }

    auto fill = [&](const std::vector<unsigned>& masks) {
        for (int m = 0; m < ues; ++m) {
            for (int f = 0; f < types; ++f) {
                action.phi(m, f) = static_cast<std::uint8_t>((masks[m] >> f) & 1u);
            }
        }
    };
    auto cpu_ok = [&] {
        return phy::cpu_load(action.phi, model.info.packet_bits, model.compute, model.info.slot_s).feasible;
    };

    std::vector<unsigned> pick(ues);
    constexpr int kTries = 256;
    for (int attempt = 0; attempt < kTries; ++attempt) {
        for (int m = 0; m < ues; ++m) {
            pick[m] = options[m][uniform_index(rng, static_cast<int>(options[m].size()))];
        }
        fill(pick);
        if (cpu_ok()) {
            return action.phi;
        }
    }

    // The server capacity rejects most of the product: enumerate it instead.
    std::vector<std::vector<unsigned>> feasible;
    std::vector<std::size_t> digit(ues, 0);
    while (true) {
        for (int m = 0; m < ues; ++m) {
            pick[m] = options[m][digit[m]];
        }
        fill(pick);
        if (cpu_ok()) {
            feasible.push_back(pick);
        }
        int m = ues - 1;
        while (m >= 0 && ++digit[m] == options[m].size()) {
            digit[m] = 0;
            --m;
        }
        if (m < 0) {
            break;
        }
    }
    fill(feasible[uniform_index(rng, static_cast<int>(feasible.size()))]);
    return action.phi;
}

mdp::ActionSpace action_space_for(Scheme scheme, const mdp::DecisionContext& ctx, const mdp::SystemModel& model,
                                  int matching_capacity)
{
    mdp::ActionSpace space;
    space.quota = model.radio.noma_quota;
    switch (scheme) {
    case Scheme::Oma:
        space = oma_restrict(space);
        break;
    case Scheme::Matching:
        space.fixed_rho = match_subcarriers(ctx.gains, space.quota, matching_capacity).rho;
        break;
    case Scheme::UniformPower:
        space.power = mdp::PowerRule::Uniform;
        break;
    default:
        break;
    }
    return space;
}

}  // namespace aoinoma::baselines
