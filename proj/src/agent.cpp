#include "acrobot/agent.hpp"

#include <algorithm>
#include <stdexcept>

namespace acrobot {

void EpisodeConfig::validate() const {
    if (!(dt_control > 0.0)) throw std::invalid_argument("control interval must be positive");
    if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
    if (steps_per_episode < 1) throw std::invalid_argument("steps per episode must be >= 1");
    if (theta0_min > theta0_max) throw std::invalid_argument("initial angle range is empty");
    if (noise_theta < 0.0 || noise_theta_dot < 0.0) {
        throw std::invalid_argument("noise levels must be non-negative");
    }
}

void Environment::validate() const {
    params.validate();
    servo.validate();
    actions.validate();
    reward.validate();
}

SimState brake_to_rest(const SimState& state, const AcrobotParams& /*params*/,
                       const ServoModel& servo) {
    SimState rest;
    rest.theta = 0.0;
    rest.theta_dot = 0.0;
    rest.u = std::clamp(std::numbers::pi, servo.u_min, servo.u_max);
    rest.u_dot = 0.0;
    rest.t = state.t;
    return rest;
}

EpisodeRecord run_episode(const LearnedModel& model, const Environment& env,
                          const EpisodeConfig& config, Rng& rng) {
    const double h = config.dt_control / config.substeps;
    const bool noisy = config.noise_theta > 0.0 || config.noise_theta_dot > 0.0;

    auto measure = [&](const SimState& s) {
        if (!noisy) return StateIndex{discretize(s.theta, s.theta_dot, env.disc)};
        const double theta = wrap_angle(s.theta + config.noise_theta * rng.normal());
        const double theta_dot = s.theta_dot + config.noise_theta_dot * rng.normal();
        return discretize(theta, theta_dot, env.disc);
    };

    SimState state;
    state.theta = wrap_angle(rng.uniform(config.theta0_min, config.theta0_max));
    state.theta_dot = 0.0;
    state.u = std::clamp(config.u0, env.servo.u_min, env.servo.u_max);

    EpisodeRecord record;
    record.steps.reserve(config.steps_per_episode);
    double reward_total = 0.0;
    double energy_total = 0.0;

    std::size_t s = measure(state).flat(env.disc);
    for (std::size_t k = 0; k < config.steps_per_episode; ++k) {
        const std::size_t a = select_action(model, s, rng);
        const ServoCommand command = env.actions[a];
        for (int i = 0; i < config.substeps; ++i) {
            state = step_rk4(state, env.params, command, env.servo, h);
        }

        const StateIndex observed = measure(state);
        const std::size_t s_next = observed.flat(env.disc);
        const double reward = step_reward(observed, state.theta, state.theta_dot, env.reward);

        record.steps.push_back({static_cast<double>(k + 1) * config.dt_control, state.theta,
                                state.theta_dot, state.u, reward,
                                static_cast<std::uint32_t>(s),
                                static_cast<std::uint32_t>(s_next),
                                static_cast<std::uint16_t>(a)});
        reward_total += reward;
        energy_total += objective_energy(state.theta, state.theta_dot, env.reward);

        if (observed.is_terminal()) {
            ++record.terminal_hits;
            if (config.terminal_mode == TerminalMode::EndEpisode) break;
            state = brake_to_rest(state, env.params, env.servo);
            s = measure(state).flat(env.disc);
        } else {
            s = s_next;
        }
    }

    const auto n = static_cast<double>(record.steps.size());
    record.mean_reward = reward_total / n;
    record.mean_energy = energy_total / n;
    return record;
}

SweepReport end_of_episode_update(LearnedModel& model, const EpisodeRecord& record) {
    if (record.steps.empty()) return {0, 0.0, true};
    for (const StepLog& step : record.steps) {
        model.record_transition(step.state, step.action, step.next_state, step.reward);
    }
    return model.policy_iteration();
}

TrainResult train(const Environment& env, const EpisodeConfig& config,
                  const ModelConfig& model_config, std::uint64_t seed,
                  const EpisodeObserver& observer) {
    env.validate();
    config.validate();

    TrainResult result{{}, {}, {},
                       LearnedModel(env.disc.state_count(), env.actions.size(), model_config)};
    result.curve.reserve(config.n_episodes);
    result.energy.reserve(config.n_episodes);

    Rng rng(seed);
    for (std::size_t episode = 0; episode < config.n_episodes; ++episode) {
        EpisodeRecord record = run_episode(result.model, env, config, rng);
        result.curve.push_back(record.mean_reward);
        result.energy.push_back(record.mean_energy);
        result.sweeps.push_back(end_of_episode_update(result.model, record));
        if (observer) observer(episode, record);
    }
    return result;
}

}  // namespace acrobot
