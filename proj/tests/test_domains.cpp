#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hipmdp/domains/hiv.hpp"
#include "hipmdp/domains/tasks.hpp"
#include "hipmdp/domains/toy.hpp"
#include "hipmdp/rng.hpp"

using namespace hipmdp;
using namespace hipmdp::domains;

namespace {

// Independent oracle integrator: forward Euler at a fine step, written from
// the model equations directly. Used to locate equilibria without touching
// the production RK4 path.
HivState euler_oracle(HivState y, double eps1, double eps2, const HivParams& p, double days,
                      double dt = 1e-3) {
    const long steps = static_cast<long>(std::llround(days / dt));
    for (long i = 0; i < steps; ++i) {
        const double T1 = y(0), T2 = y(1), T1s = y(2), T2s = y(3), V = y(4), E = y(5);
        const double infected = T1s + T2s;
        HivState d;
        d(0) = p.lambda1 - p.d1 * T1 - (1.0 - eps1) * p.k1 * V * T1;
        d(1) = p.lambda2 - p.d2 * T2 - (1.0 - p.f * eps1) * p.k2 * V * T2;
        d(2) = (1.0 - eps1) * p.k1 * V * T1 - p.delta * T1s - p.m1 * E * T1s;
        d(3) = (1.0 - p.f * eps1) * p.k2 * V * T2 - p.delta * T2s - p.m2 * E * T2s;
        d(4) = (1.0 - eps2) * p.NT * p.delta * infected - p.c * V -
               ((1.0 - eps1) * p.rho1 * p.k1 * T1 + (1.0 - p.f * eps1) * p.rho2 * p.k2 * T2) * V;
        d(5) = p.lambdaE + p.bE * infected * E / (infected + p.Kb) -
               p.dE * infected * E / (infected + p.Kd) - p.deltaE * E;
        y += dt * d;
    }
    return y;
}

}  // namespace

TEST_CASE("sample_task is deterministic in the seed") {
    const ToyConfig tcfg;
    const HivConfig hcfg;
    const auto t1 = sample_toy_task(tcfg, 1234);
    const auto t2 = sample_toy_task(tcfg, 1234);
    CHECK(t1.latent_class == t2.latent_class);
    const auto h1 = sample_hiv_task(hcfg, 99);
    const auto h2 = sample_hiv_task(hcfg, 99);
    CHECK(h1.k1 == h2.k1);
    CHECK(h1.bE == h2.bE);
}

TEST_CASE("sample_task with zero delta returns nominal coefficients exactly") {
    HivConfig cfg;
    cfg.perturbation_delta = 0.0;
    const auto p = sample_hiv_task(cfg, 7);
    const HivParams nominal;
    CHECK(p.k1 == nominal.k1);
    CHECK(p.k2 == nominal.k2);
    CHECK(p.bE == nominal.bE);
    CHECK(p.dE == nominal.dE);
}

TEST_CASE("toy class frequencies are balanced over 1000 draws") {
    const ToyConfig cfg;
    int red = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        if (sample_toy_task(cfg, 5000 + s).latent_class == ToyClass::Red) ++red;
    }
    CHECK(red >= 450);
    CHECK(red <= 550);
}

TEST_CASE("toy blue instance passes the blue gate into the goal") {
    const ToyConfig cfg;
    ToyParams params{ToyClass::Blue, 0.0};
    Rng rng(1);
    const Eigen::Vector2d start(0.45, 0.79);
    const auto r = toy_step(start, ToyAction::Up, params, cfg, rng);
    CHECK(r.done);
    CHECK(r.reward == cfg.goal_reward);
    REQUIRE(r.crossed_gate.has_value());
    CHECK(*r.crossed_gate == GateColor::Blue);
}

TEST_CASE("toy red instance is blocked at the blue gate") {
    const ToyConfig cfg;
    ToyParams params{ToyClass::Red, 0.0};
    Rng rng(2);
    const Eigen::Vector2d start(0.45, 0.79);
    const auto r = toy_step(start, ToyAction::Up, params, cfg, rng);
    CHECK_FALSE(r.done);
    CHECK(r.blocked);
    CHECK(r.next == start);  // exact pre-step position
    CHECK(r.reward == cfg.step_reward);
}

TEST_CASE("toy red instance passes the red gate") {
    const ToyConfig cfg;
    ToyParams params{ToyClass::Red, 0.0};
    Rng rng(3);
    const auto r = toy_step({0.55, 0.79}, ToyAction::Up, params, cfg, rng);
    CHECK(r.done);
    CHECK(r.reward == cfg.goal_reward);
}

TEST_CASE("toy zero-noise step moves exactly step_size along the action axis") {
    const ToyConfig cfg;
    ToyParams params{ToyClass::Blue, 0.0};
    Rng rng(4);
    const Eigen::Vector2d start(0.2, 0.2);
    const auto r = toy_step(start, ToyAction::Right, params, cfg, rng);
    CHECK(r.next.x() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(r.next.y() == 0.2);
    CHECK_FALSE(r.done);
    CHECK(r.reward == cfg.step_reward);
}

TEST_CASE("toy walls clamp movement to the unit square") {
    const ToyConfig cfg;
    ToyParams params{ToyClass::Blue, 0.0};
    Rng rng(5);
    const auto r = toy_step({0.0, 0.02}, ToyAction::Down, params, cfg, rng);
    CHECK(r.next.y() == 0.0);
}

TEST_CASE("toy goal-box side edges block both classes") {
    const ToyConfig cfg;
    Rng rng(6);
    for (const auto cls : {ToyClass::Red, ToyClass::Blue}) {
        ToyParams params{cls, 0.0};
        const Eigen::Vector2d start(0.39, 0.9);  // left of the box, at gate height
        const auto r = toy_step(start, ToyAction::Right, params, cfg, rng);
        CHECK(r.blocked);
        CHECK(r.next == start);
    }
}

TEST_CASE("toy rejects states outside the unit square") {
    const ToyConfig cfg;
    ToyParams params{ToyClass::Red, 0.0};
    Rng rng(7);
    CHECK_THROWS_AS(toy_step({1.2, 0.5}, ToyAction::Up, params, cfg, rng), std::invalid_argument);
}

TEST_CASE("toy trajectories are pure functions of the seed") {
    const ToyConfig cfg;
    ToyParams params{ToyClass::Blue, cfg.noise_scale};
    for (int rep = 0; rep < 2; ++rep) {
        // identical seeds -> identical trajectories, bitwise
        Rng r1(909), r2(909);
        Eigen::Vector2d s1 = toy_initial_state(cfg, r1);
        Eigen::Vector2d s2 = toy_initial_state(cfg, r2);
        CHECK(s1 == s2);
        for (int i = 0; i < 50; ++i) {
            const auto a = static_cast<ToyAction>(i % 4);
            const auto o1 = toy_step(s1, a, params, cfg, r1);
            const auto o2 = toy_step(s2, a, params, cfg, r2);
            CHECK(o1.next == o2.next);
            s1 = o1.next;
            s2 = o2.next;
            if (o1.done) break;
        }
    }
}

TEST_CASE("toy crossing log: no wrong-gate goal entry over seeded random episodes") {
    const ToyConfig cfg;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ToyParams params{seed % 2 == 0 ? ToyClass::Red : ToyClass::Blue, cfg.noise_scale};
        Rng rng(3000 + seed);
        Eigen::Vector2d s(0.5, 0.7);
        for (int step = 0; step < cfg.episode_cap; ++step) {
            const auto a = static_cast<ToyAction>(rng.index(4));
            const auto r = toy_step(s, a, params, cfg, rng);
            if (r.done) {
                REQUIRE(r.crossed_gate.has_value());
                if (params.latent_class == ToyClass::Red) {
                    CHECK(*r.crossed_gate == GateColor::Red);
                } else {
                    CHECK(*r.crossed_gate == GateColor::Blue);
                }
                break;
            }
            CHECK_FALSE(toy_in_goal(r.next, cfg));
            s = r.next;
        }
    }
}

TEST_CASE("hiv_reward closed-form checks") {
    const HivConfig cfg;
    HivState s = HivState::Zero();
    CHECK(hiv_reward(s, 0.0, 0.0, cfg) == 0.0);  // V = 0, E = 0, no treatment

    s(4) = 1000.0;
    const double base = hiv_reward(s, 0.0, 0.0, cfg);
    s(4) = 2000.0;
    CHECK(hiv_reward(s, 0.0, 0.0, cfg) - base ==
          doctest::Approx(-cfg.reward_virus_coeff * 1000.0).epsilon(1e-12));

    // Full treatment vs none at an identical state.
    s(4) = 500.0;
    s(5) = 12.0;
    const double none = hiv_reward(s, 0.0, 0.0, cfg);
    const double full = hiv_reward(s, cfg.eps1_max, cfg.eps2_max, cfg);
    const double expected = -(cfg.reward_rti_coeff * cfg.eps1_max * cfg.eps1_max +
                              cfg.reward_pi_coeff * cfg.eps2_max * cfg.eps2_max);
    CHECK(full - none == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("hiv_step matches the fine-step oracle at the unhealthy equilibrium") {
    const HivConfig cfg;
    const HivParams nominal;
    // Locate the untreated equilibrium with the oracle integrator.
    const HivState eq = euler_oracle(hiv_initial_state(cfg), 0.0, 0.0, nominal, 2000.0);
    // 100 days of no treatment through the production path.
    HivState y = eq;
    for (int step = 0; step < 20; ++step) {
        y = hiv_step(y, 0, nominal, cfg).next;
    }
    for (int i = 0; i < 6; ++i) {
        CHECK(std::abs(y(i) - eq(i)) / std::max(std::abs(eq(i)), 1e-12) < 1e-3);
    }
}

TEST_CASE("hiv RK4 step halving agrees to 1e-4") {
    HivConfig coarse, fine;
    coarse.dt = 0.05;
    fine.dt = 0.025;
    const HivParams p = sample_hiv_task(coarse, 13);
    HivState s = hiv_initial_state(coarse);
    for (const int action : {0, 1, 2, 3}) {
        const HivState a = hiv_step(s, action, p, coarse).next;
        const HivState b = hiv_step(s, action, p, fine).next;
        for (int i = 0; i < 6; ++i) {
            const double rel = std::abs(a(i) - b(i)) / std::max({std::abs(a(i)), std::abs(b(i)), 1e-12});
            CHECK(rel < 1e-4);
        }
        s = a;
    }
}

TEST_CASE("hiv structural zero: no spontaneous infection") {
    const HivConfig cfg;
    const HivParams p;
    HivState s;
    s << 1e6, 3000.0, 0.0, 0.0, 0.0, 10.0;  // uninfected compartments empty
    HivState y = s;
    for (int step = 0; step < 10; ++step) {
        y = hiv_step(y, 0, p, cfg).next;
        CHECK(y(4) == 0.0);
        CHECK(y(2) == 0.0);
        CHECK(y(3) == 0.0);
    }
}

TEST_CASE("hiv state stays nonnegative over random-action trajectory steps") {
    const HivConfig cfg;
    Rng rng(501);
    long steps = 0;
    for (int ep = 0; steps < 10000; ++ep) {
        const HivParams p = sample_hiv_task(cfg, 600 + ep);
        HivState s = hiv_initial_state(cfg);
        for (int t = 0; t < cfg.episode_cap && steps < 10000; ++t, ++steps) {
            const auto r = hiv_step(s, static_cast<int>(rng.index(4)), p, cfg);
            CHECK((r.next.array() >= 0.0).all());
            s = r.next;
        }
    }
}

TEST_CASE("hiv permanent treatment lowers final viral load vs none") {
    const HivConfig cfg;
    const HivParams p;
    HivState on = hiv_initial_state(cfg), off = hiv_initial_state(cfg);
    for (int step = 0; step < cfg.episode_cap; ++step) {
        on = hiv_step(on, 3, p, cfg).next;
        off = hiv_step(off, 0, p, cfg).next;
    }
    CHECK(on(4) < off(4));
}

TEST_CASE("hiv observation round trip and floor") {
    const HivConfig cfg;
    HivState s;
    s << 163574.0, 5.0, 11945.0, 46.0, 63919.0, 24.0;
    const Eigen::VectorXd obs = hiv_observe(s, cfg);
    const HivState back = hiv_from_log10(obs);
    for (int i = 0; i < 6; ++i) CHECK(back(i) == doctest::Approx(s(i)).epsilon(1e-12));

    HivState zero = HivState::Zero();
    const Eigen::VectorXd zobs = hiv_observe(zero, cfg);
    CHECK(zobs(0) == doctest::Approx(std::log10(cfg.log_floor)));
}

TEST_CASE("hiv config json round trip") {
    HivConfig cfg;
    cfg.perturbation_delta = 0.1;
    cfg.perturbed_coeffs = {"k1"};
    const auto back = HivConfig::from_json(cfg.to_json());
    CHECK(back.perturbation_delta == 0.1);
    CHECK(back.perturbed_coeffs == std::vector<std::string>{"k1"});
    CHECK(back.dt == cfg.dt);
}
