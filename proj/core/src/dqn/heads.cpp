#include "aoinoma/dqn/heads.hpp"

#include <algorithm>
#include <limits>

namespace aoinoma::dqn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kExploreTries = 4096;

// Subsets of `avail` in increasing numeric order.
std::vector<unsigned> subsets_of(unsigned avail)
{
    std::vector<unsigned> out;
    for (unsigned sub = 0; sub <= avail; ++sub) {
        if ((sub & ~avail) == 0) {
            out.push_back(sub);
        }
    }
    return out;
}

}  // namespace

ActionHeads::ActionHeads(const mdp::SystemModel& model, mdp::PowerRule rule, bool learn_phi)
    : model_(model), rule_(rule), learn_phi_(learn_phi)
{
    expects(model.types() < 16, "too many information types for the transmission heads");
    radio_size_ = mdp::radio_head_size(model_, rule_);
    phi_size_ = learn_phi_ ? (1 << model_.types()) : 0;
    catalog_.resize(radio_size_);
    mdp::ActionSpace open;
    open.power = rule_;
    for (auto& opt : mdp::radio_options(model_, open, 0)) {
        catalog_[opt.head_index] = std::move(opt);
    }
}

std::vector<int> ActionHeads::selected_outputs(const FactoredAction& action) const
{
    std::vector<int> out;
    for (int m = 0; m < model_.ues; ++m) {
        out.push_back(radio_offset(m) + action.radio[m]);
        if (learn_phi_) {
            out.push_back(phi_offset(m) + static_cast<int>(action.phi[m]));
        }
    }
    return out;
}

double ActionHeads::joint_q(std::span<const double> q, const FactoredAction& action) const
{
    double sum = 0.0;
    for (int idx : selected_outputs(action)) {
        sum += q[idx];
    }
    return sum;
}

mdp::ActionVector ActionHeads::to_action(const FactoredAction& action) const
{
    auto out = mdp::ActionVector::idle(model_.ues, model_.carriers(), model_.types());
    for (int m = 0; m < model_.ues; ++m) {
        const auto& opt = catalog_.at(action.radio[m]);
        expects(opt.has_value(), "radio head index outside the power budget");
        for (int n = 0; n < model_.carriers(); ++n) {
            out.rho(m, n) = opt->rho[n];
            out.p_idx(m, n) = opt->p_idx[n];
        }
        for (int f = 0; f < model_.types(); ++f) {
            out.phi(m, f) = static_cast<std::uint8_t>((action.phi[m] >> f) & 1u);
        }
    }
    return out;
}

FactoredAction ActionHeads::from_action(const mdp::ActionVector& action) const
{
    const int base = rule_ == mdp::PowerRule::Uniform ? 2 : model_.grid.q + 2;
    FactoredAction out{std::vector<int>(model_.ues, 0), std::vector<unsigned>(model_.ues, 0)};
    for (int m = 0; m < model_.ues; ++m) {
        int code = 0;
        for (int n = 0; n < model_.carriers(); ++n) {
            const int c = !action.rho(m, n) ? 0 : (rule_ == mdp::PowerRule::Uniform ? 1 : action.p_idx(m, n) + 1);
            code = code * base + c;
        }
        out.radio[m] = code;
        for (int f = 0; f < model_.types(); ++f) {
            out.phi[m] |= static_cast<unsigned>(action.phi(m, f)) << f;
        }
    }
    return out;
}

std::vector<const mdp::RadioOption*> ActionHeads::candidates(int ue, const mdp::ActionSpace& space) const
{
    std::vector<const mdp::RadioOption*> out;
    for (const auto& opt : catalog_) {
        if (!opt) {
            continue;
        }
        if (space.fixed_rho) {
            const auto fixed = space.fixed_rho->row(ue);
            if (!std::equal(fixed.begin(), fixed.end(), opt->rho.begin())) {
                continue;
            }
        }
        out.push_back(&*opt);
    }
    expects(!out.empty(), "no radio option satisfies the action space");
    return out;
}

unsigned ActionHeads::available_mask(const mdp::DecisionContext& ctx, int ue) const
{
    unsigned mask = 0;
    for (int f = 0; f < model_.types(); ++f) {
        if (ctx.available(ue, f)) {
            mask |= 1u << f;
        }
    }
    return mask;
}

double ActionHeads::mask_bits(unsigned mask) const
{
    double bits = 0.0;
    for (int f = 0; f < model_.types(); ++f) {
        if ((mask >> f) & 1u) {
            bits += model_.info.packet_bits[f];
        }
    }
    return bits;
}

std::vector<double> ActionHeads::rates_for(const std::vector<const mdp::RadioOption*>& picks,
                                           const mdp::DecisionContext& ctx) const
{
    Grid<std::uint8_t> rho(model_.ues, model_.carriers(), 0);
    Grid<double> power(model_.ues, model_.carriers(), 0.0);
    for (int m = 0; m < model_.ues; ++m) {
        for (int n = 0; n < model_.carriers(); ++n) {
            rho(m, n) = picks[m]->rho[n];
            power(m, n) = picks[m]->power_w[n];
        }
    }
    const Grid<double> gamma = phy::sinr(power, ctx.gains, rho, model_.radio);
    return phy::user_rates(rho, gamma, model_.radio.spacing_hz);
}

bool ActionHeads::rate_ok(unsigned mask, double rate) const
{
    Bits row(model_.types());
    for (int f = 0; f < model_.types(); ++f) {
        row[f] = static_cast<std::uint8_t>((mask >> f) & 1u);
    }
    return phy::check_rate_coverage(row, model_.info.packet_bits, rate, model_.info.slot_s);
}

bool ActionHeads::cpu_ok(double bits) const
{
    return bits * model_.compute.cycles_per_bit / model_.info.slot_s <= model_.compute.cpu_hz;
}

ActionHeads::Choice ActionHeads::greedy(std::span<const double> q, const mdp::DecisionContext& ctx,
                                        const mdp::ActionSpace& space) const
{
    expects(static_cast<int>(q.size()) == output_dim(), "Q vector does not match the head layout");
    expects(space.power == rule_, "action space and heads disagree on the power rule");
    const int ues = model_.ues;
    const int carriers = model_.carriers();

    std::vector<std::vector<const mdp::RadioOption*>> cands(ues);
    std::vector<double> radio_suffix(ues + 1, 0.0);
    for (int m = 0; m < ues; ++m) {
        cands[m] = candidates(m, space);
        const int off = radio_offset(m);
        std::stable_sort(cands[m].begin(), cands[m].end(), [&](const auto* a, const auto* b) {
            return q[off + a->head_index] > q[off + b->head_index];
        });
    }
    for (int m = ues - 1; m >= 0; --m) {
        radio_suffix[m] = radio_suffix[m + 1] + q[radio_offset(m) + cands[m].front()->head_index];
    }

    // Per-UE transmission subsets ranked by their head value; the ranking does
    // not depend on the radio picks, only the rate filter does.
    std::vector<std::vector<unsigned>> ranked(ues);
    std::vector<std::vector<double>> ranked_bits(ues);
    double phi_bound = 0.0;
    if (learn_phi_) {
        for (int m = 0; m < ues; ++m) {
            const unsigned avail = available_mask(ctx, m);
            const int off = phi_offset(m);
            ranked[m] = subsets_of(avail);
            std::stable_sort(ranked[m].begin(), ranked[m].end(), [&](unsigned a, unsigned b) {
                return q[off + static_cast<int>(a)] > q[off + static_cast<int>(b)];
            });
            for (unsigned sub : ranked[m]) {
                ranked_bits[m].push_back(mask_bits(sub));
            }
            phi_bound += q[off + static_cast<int>(ranked[m].front())];
        }
    }

    Choice best{FactoredAction{std::vector<int>(ues, 0), std::vector<unsigned>(ues, 0)}, kNegInf};
    std::vector<const mdp::RadioOption*> picks(ues, nullptr);
    std::vector<int> load(carriers, 0);
    std::vector<std::vector<unsigned>> lists(ues);
    std::vector<std::vector<double>> list_bits(ues);
    std::vector<double> suffix(ues + 1, 0.0);
    std::vector<unsigned> current(ues, 0);

    // Best transmission masks for fixed radio picks; returns their Q sum.
    auto best_phi = [&](std::vector<unsigned>& masks) -> double {
        const std::vector<double> rates = rates_for(picks, ctx);
        for (int m = 0; m < ues; ++m) {
            lists[m].clear();
            list_bits[m].clear();
            const double budget = rates[m] * model_.info.slot_s;
            for (std::size_t i = 0; i < ranked[m].size(); ++i) {
                if (ranked_bits[m][i] <= budget) {
                    lists[m].push_back(ranked[m][i]);
                    list_bits[m].push_back(ranked_bits[m][i]);
                }
            }
        }
        for (int m = ues - 1; m >= 0; --m) {
            suffix[m] = suffix[m + 1] + q[phi_offset(m) + static_cast<int>(lists[m].front())];
        }
        double bits = 0.0;
        for (int m = 0; m < ues; ++m) {
            masks[m] = lists[m].front();
            bits += list_bits[m].front();
        }
        if (cpu_ok(bits)) {
            return suffix[0];
        }
        // The server capacity binds: search the per-UE lists.
        double top = kNegInf;
        auto search = [&](auto&& self, int m, double partial, double used) -> void {
            if (m == ues) {
                if (partial > top) {
                    top = partial;
                    masks = current;
                }
                return;
            }
            for (std::size_t i = 0; i < lists[m].size(); ++i) {
                const unsigned sub = lists[m][i];
                const double value = partial + q[phi_offset(m) + static_cast<int>(sub)];
                if (value + suffix[m + 1] <= top) {
                    break;
                }
                const double more = used + list_bits[m][i];
                if (!cpu_ok(more)) {
                    continue;
                }
                current[m] = sub;
                self(self, m + 1, value, more);
            }
        };
        search(search, 0, 0.0, 0.0);
        return top;
    };

    std::vector<unsigned> masks(ues, 0);
    auto descend = [&](auto&& self, int m, double partial) -> void {
        if (m == ues) {
            double value = partial;
            if (learn_phi_) {
                if (partial + phi_bound <= best.value) {
                    return;
                }
                value += best_phi(masks);
            }
            if (value > best.value) {
                best.value = value;
                for (int k = 0; k < ues; ++k) {
                    best.action.radio[k] = picks[k]->head_index;
                    best.action.phi[k] = learn_phi_ ? masks[k] : 0u;
                }
            }
            return;
        }
        const int off = radio_offset(m);
        for (const auto* opt : cands[m]) {
            const double value = partial + q[off + opt->head_index];
            if (value + radio_suffix[m + 1] + phi_bound <= best.value) {
                break;
            }
            bool fits = true;
            for (int n = 0; n < carriers; ++n) {
                if (opt->rho[n] && load[n] + 1 > space.quota) {
                    fits = false;
                }
            }
            if (!fits) {
                continue;
            }
            for (int n = 0; n < carriers; ++n) {
                load[n] += opt->rho[n];
            }
            picks[m] = opt;
            self(self, m + 1, value);
            for (int n = 0; n < carriers; ++n) {
                load[n] -= opt->rho[n];
            }
        }
    };
    descend(descend, 0, 0.0);
    expects(best.value > kNegInf, "no feasible joint action found");
    return best;
}

FactoredAction ActionHeads::explore(const mdp::DecisionContext& ctx, const mdp::ActionSpace& space, Rng& rng) const
{
    expects(space.power == rule_, "action space and heads disagree on the power rule");
    const int ues = model_.ues;
    const int carriers = model_.carriers();
    std::vector<std::vector<const mdp::RadioOption*>> cands(ues);
    std::vector<unsigned> avail(ues);
    for (int m = 0; m < ues; ++m) {
        cands[m] = candidates(m, space);
        avail[m] = available_mask(ctx, m);
    }

    std::vector<const mdp::RadioOption*> picks(ues);
    auto quota_ok = [&] {
        for (int n = 0; n < carriers; ++n) {
            int users = 0;
            for (int m = 0; m < ues; ++m) {
                users += picks[m]->rho[n];
            }
            if (users > space.quota) {
                return false;
            }
        }
        return true;
    };
    auto pack = [&](const std::vector<unsigned>& masks) {
        FactoredAction a{std::vector<int>(ues), masks};
        for (int m = 0; m < ues; ++m) {
            a.radio[m] = picks[m]->head_index;
        }
        return a;
    };

    // Rejection from the product of per-UE choices is uniform over the
    // feasible joint set.
    std::vector<unsigned> masks(ues, 0);
    for (int attempt = 0; attempt < kExploreTries; ++attempt) {
        for (int m = 0; m < ues; ++m) {
            picks[m] = cands[m][uniform_index(rng, static_cast<int>(cands[m].size()))];
        }
        if (learn_phi_) {
            for (int m = 0; m < ues; ++m) {
                masks[m] = 0;
                for (int f = 0; f < model_.types(); ++f) {
                    if (((avail[m] >> f) & 1u) && uniform01(rng) < 0.5) {
                        masks[m] |= 1u << f;
                    }
                }
            }
        }
        if (!quota_ok()) {
            continue;
        }
        if (!learn_phi_) {
            return pack(masks);
        }
        const std::vector<double> rates = rates_for(picks, ctx);
        double bits = 0.0;
        bool ok = true;
        for (int m = 0; m < ues && ok; ++m) {
            ok = rate_ok(masks[m], rates[m]);
            bits += mask_bits(masks[m]);
        }
        if (ok && cpu_ok(bits)) {
            return pack(masks);
        }
    }

    // Acceptance is too low here: list the feasible set explicitly.
    std::vector<FactoredAction> feasible;
    std::vector<std::size_t> digit(ues, 0);
    while (true) {
        for (int m = 0; m < ues; ++m) {
            picks[m] = cands[m][digit[m]];
        }
        if (quota_ok()) {
            if (!learn_phi_) {
                feasible.push_back(pack(std::vector<unsigned>(ues, 0)));
            } else {
                const std::vector<double> rates = rates_for(picks, ctx);
                std::vector<std::vector<unsigned>> lists(ues);
                for (int m = 0; m < ues; ++m) {
                    for (unsigned sub : subsets_of(avail[m])) {
                        if (rate_ok(sub, rates[m])) {
                            lists[m].push_back(sub);
                        }
                    }
                }
                std::vector<std::size_t> inner(ues, 0);
                while (true) {
                    double bits = 0.0;
                    for (int m = 0; m < ues; ++m) {
                        masks[m] = lists[m][inner[m]];
                        bits += mask_bits(masks[m]);
                    }
                    if (cpu_ok(bits)) {
                        feasible.push_back(pack(masks));
                    }
                    int k = ues - 1;
                    while (k >= 0 && ++inner[k] == lists[k].size()) {
                        inner[k--] = 0;
                    }
                    if (k < 0) {
                        break;
                    }
                }
            }
        }
        int m = ues - 1;
        while (m >= 0 && ++digit[m] == cands[m].size()) {
            digit[m--] = 0;
        }
        if (m < 0) {
            break;
        }
    }
    return feasible[uniform_index(rng, static_cast<int>(feasible.size()))];
}

}  // namespace aoinoma::dqn
