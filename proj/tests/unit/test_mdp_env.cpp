#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aoinoma/mdp_env.hpp"
#include "oracles.hpp"

using namespace aoinoma;
using namespace aoinoma::mdp;

namespace {

EnvConfig tiny_env(int ues = 2, int carriers = 1, int types = 2, int q = 2)
{
    EnvConfig cfg;
    cfg.ues = ues;
    cfg.radio.subcarriers = carriers;
    cfg.info.types = types;
    cfg.info.packet_bits.assign(types, 1000.0);
    cfg.info.buffer_bits = 1000.0 * types;
    cfg.power_levels = q;
    cfg.channel.cell_radius_m = 50.0;
    return cfg;
}

}  // namespace

TEST_CASE("power grid")
{
    const PowerGrid g = build_power_grid(1.0, 4);
    CHECK(g.step_w == doctest::Approx(0.2));
    REQUIRE(g.levels.size() == 5);
    const double expected[] = {0.0, 0.2, 0.4, 0.6, 0.8};
    for (int i = 0; i < 5; ++i) {
        CHECK(g.levels[i] == doctest::Approx(expected[i]));
    }
    const PowerGrid g1 = build_power_grid(0.3, 1);
    CHECK(g1.levels == std::vector<double>{0.0, 0.15});
    for (int q = 1; q < 20; ++q) {
        const PowerGrid gq = build_power_grid(0.01, q);
        CHECK(gq.levels.back() < gq.p_max_w);
        CHECK(std::is_sorted(gq.levels.begin(), gq.levels.end()));
    }
    CHECK_THROWS_AS(build_power_grid(1.0, 0), ContractViolation);
}

TEST_CASE("enumeration without packets never transmits")
{
    SystemModel model = oracle::small_model(2, 2, 2, 2);
    DecisionContext ctx;
    ctx.gains = Grid<double>(2, 2, 1e-12);
    ctx.buffered = Grid<std::uint8_t>(2, 2, 0);
    ctx.updates = Grid<std::uint8_t>(2, 2, 0);
    const auto actions = enumerate_feasible_actions(ctx, model, ActionSpace{});
    REQUIRE_FALSE(actions.empty());
    for (const auto& a : actions) {
        CHECK(std::all_of(a.phi.flat().begin(), a.phi.flat().end(), [](auto b) { return b == 0; }));
    }
    CHECK(actions.front() == ActionVector::idle(2, 2, 2));
}

TEST_CASE("enumeration on the smallest lattice")
{
    SystemModel model = oracle::small_model(1, 1, 1, 1);
    DecisionContext ctx;
    ctx.gains = Grid<double>(1, 1, 1e-10);  // ample rate at P_max / 2
    ctx.buffered = Grid<std::uint8_t>(1, 1, 1);
    ctx.updates = Grid<std::uint8_t>(1, 1, 0);
    const auto actions = enumerate_feasible_actions(ctx, model, ActionSpace{});
    const auto expected = oracle::brute_force_actions(ctx, model, ActionSpace{});
    CHECK(actions == expected);
    // rho=0: idle only; rho=1, p=0: idle; rho=1, p=1: idle or send.
    CHECK(actions.size() == 4);
}

TEST_CASE("enumeration equals the brute-force filter")
{
    Rng rng = make_stream(31, Stream::Baseline);
    for (int trial = 0; trial < 40; ++trial) {
        const int ues = 1 + uniform_index(rng, 2);
        const int carriers = 1 + uniform_index(rng, 2);
        const int types = 1 + uniform_index(rng, 2);
        const int q = 1 + uniform_index(rng, 2);
        SystemModel model = oracle::small_model(ues, carriers, types, q);
        DecisionContext ctx;
        oracle::randomize(model, ctx, rng);
        ActionSpace space;
        space.quota = 1 + uniform_index(rng, 2);
        if (trial % 4 == 3) {
            space.power = PowerRule::Uniform;
        }
        const auto actions = enumerate_feasible_actions(ctx, model, space);
        CHECK(actions == oracle::brute_force_actions(ctx, model, space));
        if (oracle::fits_buffer(ctx, model)) {
            CHECK(std::find(actions.begin(), actions.end(), ActionVector::idle(ues, carriers, types)) != actions.end());
        }
    }
}

TEST_CASE("enumeration count at M=N=F=q=2")
{
    SystemModel model = oracle::small_model(2, 2, 2, 2);
    Rng rng = make_stream(32, Stream::Baseline);
    DecisionContext ctx;
    oracle::randomize(model, ctx, rng);
    long count = 0;
    oracle::for_each_lattice_point(model, [&](const ActionVector& a) { count += oracle::feasible(a, ctx, model, {}); });
    CHECK(enumerate_feasible_actions(ctx, model, ActionSpace{}).size() == static_cast<std::size_t>(count));
}

TEST_CASE("canonical index follows the lexicographic lattice order")
{
    const SystemModel model = oracle::small_model(1, 2, 1, 2);
    std::uint64_t expected = 0;
    oracle::for_each_lattice_point(model, [&](const ActionVector& a) {
        CHECK(canonical_index(a, model.grid.q) == expected);
        ++expected;
    });
    CHECK(expected == 4 * 9 * 2);
}

TEST_CASE("check_action reports each violated constraint")
{
    SystemModel model = oracle::small_model(3, 1, 1, 2);
    model.compute.cpu_hz = 1e8;  // one 1000-bit packet needs 7.375e7
    DecisionContext ctx;
    ctx.gains = Grid<double>(3, 1, 1e-10);
    ctx.buffered = Grid<std::uint8_t>(3, 1, 0);
    ctx.updates = Grid<std::uint8_t>(3, 1, 1);
    ctx.updates(2, 0) = 0;
    const ActionSpace space;

    ActionVector a = ActionVector::idle(3, 1, 1);
    CHECK(check_action(a, ctx, model, space).ok());

    ActionVector bad = a;
    bad.p_idx(0, 0) = 1;  // power without assignment
    CHECK_FALSE(check_action(bad, ctx, model, space).structure);

    bad = a;
    bad.rho(0, 0) = bad.rho(1, 0) = bad.rho(2, 0) = 1;
    CHECK_FALSE(check_action(bad, ctx, model, space).quota);

    bad = a;
    bad.phi(2, 0) = 1;
    CHECK_FALSE(check_action(bad, ctx, model, space).transmission);

    bad = a;
    bad.phi(0, 0) = 1;  // no subcarrier, no rate
    const Feasibility f = check_action(bad, ctx, model, space);
    CHECK_FALSE(f.rate);
    CHECK(f.cpu);

    bad.rho(0, 0) = bad.rho(1, 0) = 1;
    bad.p_idx(0, 0) = bad.p_idx(1, 0) = 2;
    bad.phi(1, 0) = 1;
    CHECK_FALSE(check_action(bad, ctx, model, space).cpu);

    ActionSpace uniform;
    uniform.power = PowerRule::Uniform;
    ActionVector u = a;
    u.rho(0, 0) = 1;
    CHECK_FALSE(check_action(u, ctx, model, uniform).structure);
    u.p_idx(0, 0) = 1;
    CHECK(check_action(u, ctx, model, uniform).ok());

    ActionSpace fixed;
    fixed.fixed_rho = Grid<std::uint8_t>(3, 1, 0);
    CHECK_FALSE(check_action(u, ctx, model, fixed).structure);
}

TEST_CASE("buffer check keeps the post-decision occupancy within capacity")
{
    SystemModel model = oracle::small_model(1, 1, 2, 1);
    model.info.buffer_bits = 1000.0;
    DecisionContext ctx;
    ctx.gains = Grid<double>(1, 1, 1e-10);
    ctx.buffered = Grid<std::uint8_t>(1, 2, 1);
    ctx.updates = Grid<std::uint8_t>(1, 2, 0);
    ActionVector a = ActionVector::idle(1, 1, 2);
    CHECK_FALSE(check_action(a, ctx, model, ActionSpace{}).buffer);
    a.rho(0, 0) = 1;
    a.p_idx(0, 0) = 1;
    a.phi(0, 0) = 1;
    CHECK(check_action(a, ctx, model, ActionSpace{}).ok());
}

TEST_CASE("radio options")
{
    const SystemModel model = oracle::small_model(2, 2, 1, 4, 1.0);
    CHECK(radio_head_size(model, PowerRule::Grid) == 36);
    CHECK(radio_head_size(model, PowerRule::Uniform) == 4);

    const auto opts = radio_options(model, ActionSpace{}, 0);
    // Pairs of levels whose sum exceeds P_max (i + j > 5 in steps of 0.2) are cut.
    int expected = 0;
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            expected += std::max(a - 1, 0) + std::max(b - 1, 0) <= 5;
        }
    }
    CHECK(opts.size() == static_cast<std::size_t>(expected));
    for (const auto& o : opts) {
        const int c0 = o.head_index / 6;
        const int c1 = o.head_index % 6;
        CHECK(o.rho[0] == (c0 > 0));
        CHECK(o.rho[1] == (c1 > 0));
        CHECK(o.p_idx[0] == std::max(c0 - 1, 0));
        CHECK(o.p_idx[1] == std::max(c1 - 1, 0));
    }

    ActionSpace uniform;
    uniform.power = PowerRule::Uniform;
    const auto u = radio_options(model, uniform, 1);
    REQUIRE(u.size() == 4);
    CHECK(u[3].power_w == std::vector<double>{0.5, 0.5});
    CHECK(u[1].power_w == std::vector<double>{0.0, 1.0});

    ActionSpace fixed;
    fixed.fixed_rho = Grid<std::uint8_t>(2, 2, 0);
    (*fixed.fixed_rho)(1, 0) = 1;
    for (const auto& o : radio_options(model, fixed, 1)) {
        CHECK(o.rho == Bits{1, 0});
    }
}

TEST_CASE("reward")
{
    const Grid<double> none(2, 2, 0.0);
    CHECK(reward(std::vector<double>{0.0, 0.0}, none, 0.1, 0.2) == 0.0);
    // 1e6 bit/s over 1 W (0.5 radiated + 2 x 0.25 circuit) at AAoI 0.1 s.
    Grid<double> p(2, 1, 0.0);
    p(0, 0) = 0.5;
    CHECK(reward(std::vector<double>{4e5, 6e5}, p, 0.1, 0.25) == doctest::Approx(1e7));
    CHECK(reward(std::vector<double>{8e5, 12e5}, p, 0.1, 0.25) == doctest::Approx(2e7));
    CHECK_THROWS_AS(reward(std::vector<double>{1.0}, p, 0.0, 0.25), ContractViolation);
}

TEST_CASE("reward is symmetric under UE permutation")
{
    Rng rng = make_stream(33, Stream::Fading);
    phy::RadioConfig radio;
    for (int trial = 0; trial < 200; ++trial) {
        const int ues = 3, carriers = 2;
        Grid<double> h(ues, carriers), p(ues, carriers);
        Grid<std::uint8_t> rho(ues, carriers);
        for (int m = 0; m < ues; ++m) {
            for (int n = 0; n < carriers; ++n) {
                h(m, n) = std::pow(10.0, -14.0 + 3.0 * uniform01(rng));
                rho(m, n) = uniform01(rng) < 0.6;
                p(m, n) = rho(m, n) ? 0.005 * uniform01(rng) : 0.0;
            }
        }
        std::vector<int> perm(ues);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        Grid<double> h2(ues, carriers), p2(ues, carriers);
        Grid<std::uint8_t> rho2(ues, carriers);
        for (int m = 0; m < ues; ++m) {
            for (int n = 0; n < carriers; ++n) {
                h2(perm[m], n) = h(m, n);
                p2(perm[m], n) = p(m, n);
                rho2(perm[m], n) = rho(m, n);
            }
        }
        const double aaoi = 0.05;
        const double a = reward(phy::user_rates(rho, phy::sinr(p, h, rho, radio), radio.spacing_hz), p, aaoi, 0.2);
        const double b =
            reward(phy::user_rates(rho2, phy::sinr(p2, h2, rho2, radio), radio.spacing_hz), p2, aaoi, 0.2);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("discounted return")
{
    CHECK(discounted_return(std::vector<double>{0.0, 0.0, 0.0}, 0.9) == 0.0);
    const double c = 2.5;
    CHECK(discounted_return(std::vector<double>{c, c, c}, 0.9) == doctest::Approx(c * (0.9 + 0.81 + 0.729) / 3));
    // Weights start at gamma^1, so a zero discount weights nothing.
    CHECK(discounted_return(std::vector<double>{c, c}, 0.0) == 0.0);
    CHECK_THROWS_AS(discounted_return(std::vector<double>{c}, 1.0), ContractViolation);
}

TEST_CASE("constraint tracker")
{
    ConstraintConfig cfg;
    cfg.kappa_s = 0.2;
    cfg.window_slots = 10;
    AoiConstraintTracker t(2, cfg);
    CHECK(t.excess() == 0.0);
    for (int i = 0; i < 5; ++i) {
        t.observe(std::vector<double>{0.1, 0.3});
    }
    // Bias correction makes a constant series its own mean.
    CHECK(t.running_mean(0) == doctest::Approx(0.1));
    CHECK(t.running_mean(1) == doctest::Approx(0.3));
    CHECK(t.excess() == doctest::Approx(0.5 * (0.1 / 0.2)));
}

TEST_CASE("environment: transmitting a fresh packet")
{
    NomaEnv env(tiny_env(), 4);
    ActionSpace space;
    bool tested = false;
    for (int slot = 0; slot < 50 && !tested; ++slot) {
        const auto& ctx = env.context();
        const auto actions = enumerate_feasible_actions(ctx, env.model(), space);
        for (const auto& a : actions) {
            for (int m = 0; m < 2 && !tested; ++m) {
                for (int f = 0; f < 2 && !tested; ++f) {
                    if (a.phi(m, f) && ctx.updates(m, f) && !ctx.buffered(m, f)) {
                        env.step(a, space);
                        CHECK(env.ues()[m].buffered[f] == 0);
                        CHECK(env.ues()[m].aoi_s[f] == doctest::Approx(env.config().info.slot_s));
                        tested = true;
                    }
                }
            }
            if (tested) {
                break;
            }
        }
        if (!tested) {
            env.step(ActionVector::idle(2, 1, 2), space);
        }
    }
    CHECK(tested);
}

TEST_CASE("environment: idle policy saturates the AoI")
{
    EnvConfig cfg = tiny_env();
    cfg.info.theta_cap_slots = 40;
    NomaEnv env(cfg, 5);
    const ActionVector idle = ActionVector::idle(2, 1, 2);
    StepResult r;
    for (int i = 0; i < 1000; ++i) {
        r = env.step(idle, ActionSpace{});
        CHECK(r.metrics.reward_raw == 0.0);
        CHECK(r.metrics.cpu_energy_j == 0.0);
    }
    CHECK(r.metrics.aaoi_s == doctest::Approx(cfg.info.max_aoi_s()));
    CHECK(r.metrics.p_total_w == doctest::Approx(2 * cfg.radio.circuit_w));
}

TEST_CASE("environment: determinism, encoding and penalty")
{
    EnvConfig cfg = tiny_env(2, 2, 2, 2);
    cfg.constraint.kappa_s = 0.02;
    NomaEnv a(cfg, 77), b(cfg, 77);
    Rng pick = make_stream(1, Stream::Exploration);
    CHECK(a.state_dim() == 2 * 2 + 2 * 2 + 2 + 2 * 2 + 2 * 2);
    for (int t = 0; t < 300; ++t) {
        CHECK(a.encode() == b.encode());
        const auto actions = enumerate_feasible_actions(a.context(), a.model(), ActionSpace{});
        const auto& act = actions[uniform_index(pick, static_cast<int>(actions.size()))];
        const auto ra = a.step(act, ActionSpace{});
        const auto rb = b.step(act, ActionSpace{});
        CHECK(ra.next_state == rb.next_state);
        CHECK(ra.metrics.reward_raw == rb.metrics.reward_raw);
        CHECK(std::isfinite(ra.metrics.reward_raw));
        CHECK(ra.next_state.size() == static_cast<std::size_t>(a.state_dim()));
        for (double v : ra.next_state) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
        CHECK(ra.metrics.reward_penalized ==
              doctest::Approx(ra.metrics.reward_raw -
                              cfg.constraint.penalty_weight * ra.metrics.penalty * a.reward_scale()));
        CHECK(ra.metrics.ee_bits_per_joule_per_hz ==
              doctest::Approx(ra.metrics.r_total_bps / ra.metrics.p_total_w / cfg.radio.spacing_hz));
    }
    CHECK(a.positions()[0].x == b.positions()[0].x);
}

TEST_CASE("environment rejects infeasible actions")
{
    NomaEnv env(tiny_env(), 1);
    ActionVector a = ActionVector::idle(2, 1, 2);
    a.p_idx(0, 0) = 1;
    CHECK_THROWS_AS(env.step(a, ActionSpace{}), ContractViolation);
}
