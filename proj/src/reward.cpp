#include "acrobot/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace acrobot {

RewardSpec RewardSpec::energy_scaled(double target, double c_exp, double terminal_penalty) {
    RewardSpec spec;
    spec.objective = Objective::Energy;
    spec.mode = EnergyMode::Scaled;
    spec.energy_target = target;
    spec.c_exp = c_exp;
    spec.terminal_penalty = terminal_penalty;
    return spec;
}

RewardSpec RewardSpec::energy_raw(double target, const AcrobotParams& params,
                                  double terminal_penalty) {
    RewardSpec spec;
    spec.objective = Objective::Energy;
    spec.mode = EnergyMode::Raw;
    spec.energy_target = target;
    spec.params = params;
    spec.terminal_penalty = terminal_penalty;
    return spec;
}

RewardSpec RewardSpec::rotation(double theta_dot_target, double c_exp, double terminal_penalty) {
    RewardSpec spec;
    spec.objective = Objective::Rotation;
    spec.c_exp = c_exp;
    spec.theta_dot_target = theta_dot_target;
    spec.terminal_penalty = terminal_penalty;
    return spec;
}

void RewardSpec::validate() const {
    if (!(terminal_penalty <= 0.0)) throw std::invalid_argument("terminal penalty must be <= 0");
    if (objective == Objective::Energy) {
        if (!(energy_target > 0.0)) throw std::invalid_argument("energy target must be positive");
        if (mode == EnergyMode::Scaled && !(c_exp > 0.0)) {
            throw std::invalid_argument("scaled energy needs c_exp > 0");
        }
        if (mode == EnergyMode::Raw) params.validate();
    } else {
        if (!(theta_dot_target > 0.0)) throw std::invalid_argument("rotation target must be positive");
        if (!(c_exp > 0.0)) throw std::invalid_argument("rotation objective needs c_exp > 0");
    }
}

double objective_energy(double theta, double theta_dot, const RewardSpec& spec) {
    if (spec.objective == Objective::Energy && spec.mode == EnergyMode::Raw) {
        return hamiltonian(theta, theta_dot, spec.params);
    }
    return scaled_hamiltonian(theta, theta_dot, spec.c_exp);
}

double energy_reward(double theta, double theta_dot, const RewardSpec& spec) {
    const double deviation = objective_energy(theta, theta_dot, spec) - spec.energy_target;
    return -deviation * deviation;
}

double rotation_reward(double theta_dot, const RewardSpec& spec) {
    const double deviation = spec.theta_dot_target - std::abs(theta_dot);
    return -deviation * deviation;
}

double step_reward(const StateIndex& successor, double theta, double theta_dot,
                   const RewardSpec& spec) {
    if (successor.is_terminal()) return spec.terminal_penalty;
    if (spec.objective == Objective::Rotation) return rotation_reward(theta_dot, spec);
    return energy_reward(theta, theta_dot, spec);
}

double worst_in_band_reward(const RewardSpec& spec, const Discretization& disc) {
    const double v_abs_max = std::max(std::abs(disc.vel_min()), std::abs(disc.vel_max()));
    if (spec.objective == Objective::Rotation) {
        // |theta_dot| ranges over [v_lo, v_abs_max] inside the band.
        const double v_lo =
            (disc.vel_min() <= 0.0 && disc.vel_max() >= 0.0)
                ? 0.0
                : std::min(std::abs(disc.vel_min()), std::abs(disc.vel_max()));
        return std::min(rotation_reward(v_lo, spec), rotation_reward(v_abs_max, spec));
    }
    // Energy is monotone in |theta_dot| and in sin^2(theta/2): the extremes
    // are the lowest energy (rest at theta = 0) and the highest (theta = pi, band edge).
    const double v_lo =
        (disc.vel_min() <= 0.0 && disc.vel_max() >= 0.0)
            ? 0.0
            : std::min(std::abs(disc.vel_min()), std::abs(disc.vel_max()));
    return std::min(energy_reward(0.0, v_lo, spec),
                    energy_reward(std::numbers::pi, v_abs_max, spec));
}

double default_terminal_penalty(const RewardSpec& spec, const Discretization& disc) {
    return 10.0 * worst_in_band_reward(spec, disc);
}

}  // namespace acrobot
