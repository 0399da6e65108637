#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "acrobot/dynamics.hpp"
#include "acrobot/mdp.hpp"
#include "acrobot/reward.hpp"

namespace acrobot {

/// What happens when the pendulum leaves the velocity band.
enum class TerminalMode {
    Reset,       ///< brake to rest and continue; the step budget stays exact
    EndEpisode,  ///< stop the episode at the terminal transition
};

struct EpisodeConfig {
    double dt_control = 0.01;  ///< control interval [s]
    int substeps = 1;          ///< RK4 steps per control interval
    std::size_t steps_per_episode = 100000;
    std::size_t n_episodes = 300;
    double theta0_min = -10.0 * std::numbers::pi / 180.0;
    double theta0_max = 10.0 * std::numbers::pi / 180.0;
    double u0 = std::numbers::pi;
    TerminalMode terminal_mode = TerminalMode::Reset;
    double noise_theta = 0.0;      ///< std-dev of measurement noise on theta
    double noise_theta_dot = 0.0;  ///< std-dev of measurement noise on theta_dot

    double episode_duration() const { return dt_control * static_cast<double>(steps_per_episode); }
    void validate() const;
    bool operator==(const EpisodeConfig&) const = default;
};

/// Everything about the controlled system that stays fixed during training.
struct Environment {
    AcrobotParams params = AcrobotParams::simulation_baseline();
    ServoModel servo;
    Discretization disc;
    ActionSet actions = ActionSet::ico();
    RewardSpec reward;

    void validate() const;
    bool operator==(const Environment&) const = default;
};

struct StepLog {
    double t;  ///< time since episode start at the end of the step
    double theta;
    double theta_dot;
    double u;
    double reward;
    std::uint32_t state;       ///< flat index the action was chosen in
    std::uint32_t next_state;  ///< flat index observed after the step
    std::uint16_t action;
};

struct EpisodeRecord {
    std::vector<StepLog> steps;
    double mean_reward = 0.0;
    double mean_energy = 0.0;  ///< mean objective energy over the steps
    std::size_t terminal_hits = 0;

    bool hit_terminal() const { return terminal_hits > 0; }
};

/// Rest state (0, 0, pi); u is clamped into the servo range.
SimState brake_to_rest(const SimState& state, const AcrobotParams& params,
                       const ServoModel& servo);

/// Runs one episode with the current model (which is not modified).
EpisodeRecord run_episode(const LearnedModel& model, const Environment& env,
                          const EpisodeConfig& config, Rng& rng);

/// Folds the logged transitions into the model and recomputes the value function.
SweepReport end_of_episode_update(LearnedModel& model, const EpisodeRecord& record);

struct TrainResult {
    std::vector<double> curve;        ///< per-episode mean reward
    std::vector<double> energy;       ///< per-episode mean objective energy
    std::vector<SweepReport> sweeps;  ///< value-iteration diagnostics per episode
    LearnedModel model;
};

using EpisodeObserver = std::function<void(std::size_t episode, const EpisodeRecord&)>;

/// Fresh model, then n_episodes of run_episode + end_of_episode_update.
TrainResult train(const Environment& env, const EpisodeConfig& config,
                  const ModelConfig& model_config, std::uint64_t seed,
                  const EpisodeObserver& observer = {});

}  // namespace acrobot
