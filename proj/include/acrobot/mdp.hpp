#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "acrobot/dynamics.hpp"

namespace acrobot {

class MdpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Uniform grid over (theta, theta_dot). Angular bin width is kept in
/// degrees so that divisibility of 360 deg is checked exactly.
class Discretization {
public:
    Discretization() = default;
    /// Throws MdpError unless 360/dtheta_deg and (vel_max - vel_min)/dvel
    /// are integers.
    Discretization(double dtheta_deg, double vel_min, double vel_max, double dvel);

    double dtheta_deg() const { return dtheta_deg_; }
    double dtheta() const { return dtheta_; }
    double vel_min() const { return vel_min_; }
    double vel_max() const { return vel_max_; }
    double dvel() const { return dvel_; }
    int n_angle() const { return n_angle_; }
    int n_vel() const { return n_vel_; }
    /// Grid cells plus the terminal state.
    std::size_t state_count() const { return static_cast<std::size_t>(n_angle_) * n_vel_ + 1; }
    std::size_t terminal_index() const { return state_count() - 1; }

    bool operator==(const Discretization&) const = default;

private:
    double dtheta_deg_ = 10.0;
    double dtheta_ = 10.0 * kTwoPi / 360.0;
    double vel_min_ = -5.0;
    double vel_max_ = 5.0;
    double dvel_ = 0.25;
    int n_angle_ = 36;
    int n_vel_ = 40;
};

/// A grid cell or the absorbing terminal state.
class StateIndex {
public:
    static StateIndex grid(int angle_bin, int vel_bin) { return {angle_bin, vel_bin, false}; }
    static StateIndex terminal() { return {-1, -1, true}; }
    static StateIndex from_flat(std::size_t flat, const Discretization& disc);

    bool is_terminal() const { return terminal_; }
    int angle_bin() const { return angle_bin_; }
    int vel_bin() const { return vel_bin_; }
    std::size_t flat(const Discretization& disc) const;

    bool operator==(const StateIndex&) const = default;

private:
    StateIndex(int a, int v, bool t) : angle_bin_(a), vel_bin_(v), terminal_(t) {}
    int angle_bin_;
    int vel_bin_;
    bool terminal_;
};

StateIndex discretize(double theta, double theta_dot, const Discretization& disc);

/// Centre of a grid cell, (theta, theta_dot).
std::pair<double, double> cell_center(int angle_bin, int vel_bin, const Discretization& disc);

inline std::size_t state_count(const Discretization& disc) { return disc.state_count(); }

struct ActionSet {
    std::string name;
    std::vector<ServoCommand> commands;

    std::size_t size() const { return commands.size(); }
    ServoCommand operator[](std::size_t i) const { return commands[i]; }
    void validate() const;
    bool operator==(const ActionSet&) const = default;

    static ActionSet ico();  ///< {a1, a2}
    static ActionSet a1();   ///< {a4, a5}
    static ActionSet a2();   ///< {a3, a4, a5}
    static ActionSet a3();   ///< {a1, a2, a3}
    /// Looks up a preset by name ("ICO", "A1", "A2", "A3").
    static ActionSet preset(const std::string& name);
};

struct ModelConfig {
    double gamma = 0.9;
    double p_explore = 0.1;
    double terminal_penalty = -1000.0;

    void validate() const;
    bool operator==(const ModelConfig&) const = default;
};

struct SweepReport {
    int sweeps = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Count-based transition and reward model with a state value function.
/// State indices are flat; the last index is the terminal state.
class LearnedModel {
public:
    LearnedModel(std::size_t n_states, std::size_t n_actions, ModelConfig config);

    std::size_t n_states() const { return n_states_; }
    std::size_t n_actions() const { return n_actions_; }
    std::size_t terminal() const { return n_states_ - 1; }
    const ModelConfig& config() const { return config_; }

    void record_transition(std::size_t s, std::size_t a, std::size_t s_next, double reward);

    std::uint64_t visits(std::size_t s, std::size_t a) const { return visits_[slot(s, a)]; }
    std::uint64_t successor_count(std::size_t s, std::size_t a, std::size_t s_next) const;
    double reward_sum(std::size_t s, std::size_t a) const { return reward_sums_[slot(s, a)]; }
    /// Sample mean reward; 0 for an unvisited pair.
    double mean_reward(std::size_t s, std::size_t a) const;
    /// Frequency estimate. An unvisited pair is believed to stay in place.
    double transition_prob(std::size_t s, std::size_t a, std::size_t s_next) const;

    /// R(s,a) + gamma sum_s' P(s'|s,a) v(s') against the given value array.
    double q_value(std::size_t s, std::size_t a, std::span<const double> values) const;
    double q_value(std::size_t s, std::size_t a) const { return q_value(s, a, values_); }

    /// Lowest-index argmax of q.
    std::size_t greedy_action(std::size_t s) const;

    /// One Jacobi Bellman backup v'(s) = max_a q(s, a; v); v'(terminal) = 0.
    std::vector<double> bellman_sweep(std::span<const double> values) const;

    /// Sweeps until the sup-norm change drops below `tolerance` or
    /// `max_sweeps` is reached, starting from the current value function.
    SweepReport policy_iteration(double tolerance = 1e-6, int max_sweeps = 1000);

    std::span<const double> values() const { return values_; }
    void set_values(std::vector<double> values);

    /// Multiplies every stored reward sum (test hook for scaling invariance).
    void scale_rewards(double factor);

    /// True iff successor counts sum to the visit count for every pair.
    bool counts_consistent() const;

private:
    struct Successor {
        std::uint32_t state;
        std::uint32_t count;
    };

    std::size_t slot(std::size_t s, std::size_t a) const { return s * n_actions_ + a; }
    void check_pair(std::size_t s, std::size_t a) const;

    std::size_t n_states_;
    std::size_t n_actions_;
    ModelConfig config_;
    std::vector<std::uint64_t> visits_;
    std::vector<double> reward_sums_;
    std::vector<std::vector<Successor>> successors_;
    std::vector<double> values_;
};

/// Seeded generator used throughout training. Uniform draws are derived from
/// raw 64-bit output so sequences are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * n); }
    /// Standard normal by Box-Muller.
    double normal();

private:
    std::mt19937_64 engine_;
};

/// Epsilon-greedy: with probability p_explore a uniformly random
/// non-greedy action, otherwise the greedy one.
std::size_t select_action(const LearnedModel& model, std::size_t s, Rng& rng);

}  // namespace acrobot
