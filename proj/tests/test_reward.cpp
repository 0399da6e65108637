#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "acrobot/reward.hpp"

using namespace acrobot;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kCIco = 9.81 / 4.0;

RewardSpec ico_reward() { return RewardSpec::energy_scaled(1.3 * kCIco, kCIco, -2000.0); }

}  // namespace

TEST_SUITE("reward") {

TEST_CASE("energy reward vanishes on target") {
    const RewardSpec spec = ico_reward();
    const double thd = std::sqrt(2.0 * spec.energy_target);
    CHECK(energy_reward(0.0, thd, spec) == Approx(0.0).scale(1.0));
}

TEST_CASE("energy reward at rest on the baseline target") {
    CHECK(energy_reward(0.0, 0.0, ico_reward()) == Approx(-10.165).epsilon(1e-4));
}

TEST_CASE("energy reward is symmetric about the target") {
    const RewardSpec spec = ico_reward();
    for (double delta : {0.1, 0.7, 2.0}) {
        const double above = std::sqrt(2.0 * (spec.energy_target + delta));
        const double below = std::sqrt(2.0 * (spec.energy_target - delta));
        CHECK(energy_reward(0.0, above, spec) == Approx(energy_reward(0.0, below, spec)));
    }
}

TEST_CASE("raw mode uses the first-link Hamiltonian") {
    const AcrobotParams p = AcrobotParams::simulation_baseline();
    const RewardSpec raw = RewardSpec::energy_raw(100.0, p, -1e6);
    CHECK(energy_reward(kPi, 0.0, raw) == Approx(-std::pow(156.96 - 100.0, 2)));
}

TEST_CASE("scaled and raw objectives agree up to J1") {
    const AcrobotParams p = AcrobotParams::simulation_baseline();
    const double target = 1.3 * kCIco;
    const RewardSpec scaled = RewardSpec::energy_scaled(target, p.g / p.l1, -1.0);
    const RewardSpec raw = RewardSpec::energy_raw(target * p.J1, p, -1.0);
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi), vel(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double th = angle(gen), thd = vel(gen);
        CHECK(objective_energy(th, thd, scaled) == Approx(objective_energy(th, thd, raw) / p.J1));
        CHECK(energy_reward(th, thd, raw) ==
              Approx(energy_reward(th, thd, scaled) * p.J1 * p.J1));
    }
}

TEST_CASE("energy deviation is recoverable from the reward") {
    const RewardSpec spec = ico_reward();
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi), vel(-5.0, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double th = angle(gen), thd = vel(gen);
        const double r = energy_reward(th, thd, spec);
        CHECK(std::sqrt(-r) ==
              Approx(std::abs(scaled_hamiltonian(th, thd, kCIco) - spec.energy_target)));
    }
}

TEST_CASE("rotation reward examples") {
    const RewardSpec spec = RewardSpec::rotation(7.97, 7.06, -1000.0);
    CHECK(rotation_reward(7.97, spec) == 0.0);
    CHECK(rotation_reward(-7.97, spec) == 0.0);
    CHECK(rotation_reward(0.0, spec) == Approx(-63.5).epsilon(1e-3));
    for (double thd : {0.3, 2.0, 9.5}) CHECK(rotation_reward(thd, spec) == rotation_reward(-thd, spec));
}

TEST_CASE("default rotation target") {
    CHECK(default_rotation_target(7.06) == Approx(7.97).epsilon(1e-3));
}

TEST_CASE("step reward on terminal and on target") {
    const RewardSpec spec = ico_reward();
    CHECK(step_reward(StateIndex::terminal(), 0.0, 9.0, spec) == spec.terminal_penalty);
    const double thd = std::sqrt(2.0 * spec.energy_target);
    CHECK(step_reward(StateIndex::grid(0, 30), 0.0, thd, spec) == Approx(0.0).scale(1.0));
}

TEST_CASE("rewards are non-positive and zero only on target") {
    const RewardSpec spec = ico_reward();
    const RewardSpec rot = RewardSpec::rotation(4.0, kCIco, -1.0);
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> angle(0.0, 2 * kPi), vel(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double th = angle(gen), thd = vel(gen);
        CHECK(energy_reward(th, thd, spec) <= 0.0);
        CHECK(rotation_reward(thd, rot) <= 0.0);
    }
    CHECK(energy_reward(0.0, 0.1, spec) < 0.0);
    CHECK(rotation_reward(3.9, rot) < 0.0);
}

TEST_CASE("in-band rewards never fall below the default terminal penalty") {
    const Discretization disc;
    for (RewardSpec spec : {ico_reward(), RewardSpec::energy_scaled(4.4, 4.466, 0.0),
                            RewardSpec::rotation(6.0, 4.0, 0.0)}) {
        spec.terminal_penalty = default_terminal_penalty(spec, disc);
        double worst = 0.0;
        for (int a = 0; a <= 360; ++a) {
            for (int v = 0; v <= 400; ++v) {
                const double th = std::min(a * kPi / 180.0, std::nextafter(2 * kPi, 0.0));
                const double thd = disc.vel_min() + v * (disc.vel_max() - disc.vel_min()) / 400;
                worst = std::min(worst, step_reward(discretize(th, thd, disc), th, thd, spec));
            }
        }
        CHECK(worst >= spec.terminal_penalty);
        CHECK(worst >= worst_in_band_reward(spec, disc) - 1e-9);
        CHECK(spec.terminal_penalty == Approx(10 * worst_in_band_reward(spec, disc)));
    }
}

TEST_CASE("reward spec validation") {
    CHECK_THROWS(RewardSpec::energy_scaled(-1.0, 2.0, -1.0).validate());
    CHECK_THROWS(RewardSpec::energy_scaled(1.0, 0.0, -1.0).validate());
    CHECK_THROWS(RewardSpec::energy_scaled(1.0, 2.0, 5.0).validate());
    CHECK_THROWS(RewardSpec::rotation(0.0, 2.0, -1.0).validate());
    CHECK_NOTHROW(ico_reward().validate());
}

}
