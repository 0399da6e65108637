#pragma once

#include <cmath>

#include "acrobot/dynamics.hpp"
#include "acrobot/mdp.hpp"

namespace acrobot {

enum class Objective { Energy, Rotation };
enum class EnergyMode { Raw, Scaled };

/// Control objective and its target.
///
/// Energy: reward -(E - E_d)^2 where E is the first-link Hamiltonian (raw
/// mode, needs `params`) or the scaled Hamiltonian with `c_exp`.
/// Rotation: reward -(theta_dot_d - |theta_dot|)^2; `c_exp` is kept for
/// energy reporting and the separatrix.
struct RewardSpec {
    Objective objective = Objective::Energy;
    EnergyMode mode = EnergyMode::Scaled;
    double energy_target = 0.0;
    double c_exp = 0.0;
    AcrobotParams params;
    double theta_dot_target = 0.0;
    double terminal_penalty = 0.0;

    static RewardSpec energy_scaled(double target, double c_exp, double terminal_penalty);
    static RewardSpec energy_raw(double target, const AcrobotParams& params,
                                 double terminal_penalty);
    static RewardSpec rotation(double theta_dot_target, double c_exp, double terminal_penalty);

    void validate() const;
    bool operator==(const RewardSpec&) const = default;
};

/// Energy measure the objective is expressed in.
double objective_energy(double theta, double theta_dot, const RewardSpec& spec);

double energy_reward(double theta, double theta_dot, const RewardSpec& spec);
double rotation_reward(double theta_dot, const RewardSpec& spec);

/// Terminal penalty when the successor is terminal, the objective's reward otherwise.
double step_reward(const StateIndex& successor, double theta, double theta_dot,
                   const RewardSpec& spec);

/// Most negative in-band reward over the velocity band and all angles.
double worst_in_band_reward(const RewardSpec& spec, const Discretization& disc);

/// Default terminal penalty: ten times the worst in-band single-step penalty.
double default_terminal_penalty(const RewardSpec& spec, const Discretization& disc);

/// Default rotation target 3 sqrt(c_exp).
inline double default_rotation_target(double c_exp) { return 3.0 * std::sqrt(c_exp); }

}  // namespace acrobot
