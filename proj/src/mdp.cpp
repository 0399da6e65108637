#include "acrobot/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace acrobot {

namespace {

// Ratio that must be a whole number, tolerant to decimal inputs like 0.3125.
int whole_ratio(double numerator, double denominator, const char* what) {
    const double ratio = numerator / denominator;
    const double rounded = std::round(ratio);
    if (rounded < 1 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, rounded)) {
        throw MdpError(std::string(what) + " does not divide its range into whole bins");
    }
    return static_cast<int>(rounded);
}

}  // namespace

Discretization::Discretization(double dtheta_deg, double vel_min, double vel_max, double dvel)
    : dtheta_deg_(dtheta_deg), vel_min_(vel_min), vel_max_(vel_max), dvel_(dvel) {
    if (!(dtheta_deg > 0) || !(dvel > 0)) throw MdpError("bin widths must be positive");
    if (!(vel_max > vel_min)) throw MdpError("velocity band must satisfy vel_min < vel_max");
    n_angle_ = whole_ratio(360.0, dtheta_deg, "angular bin width");
    n_vel_ = whole_ratio(vel_max - vel_min, dvel, "velocity bin width");
    dtheta_ = kTwoPi / n_angle_;
}

StateIndex StateIndex::from_flat(std::size_t flat, const Discretization& disc) {
    if (flat == disc.terminal_index()) return terminal();
    if (flat > disc.terminal_index()) throw MdpError("flat state index out of range");
    const auto n_vel = static_cast<std::size_t>(disc.n_vel());
    return grid(static_cast<int>(flat / n_vel), static_cast<int>(flat % n_vel));
}

std::size_t StateIndex::flat(const Discretization& disc) const {
    if (terminal_) return disc.terminal_index();
    return static_cast<std::size_t>(angle_bin_) * disc.n_vel() + vel_bin_;
}

StateIndex discretize(double theta, double theta_dot, const Discretization& disc) {
    if (!(theta >= 0.0 && theta < kTwoPi)) throw MdpError("theta must lie in [0, 2pi)");
    if (!(theta_dot >= disc.vel_min() && theta_dot <= disc.vel_max())) {
        return StateIndex::terminal();
    }
    const int angle_bin =
        std::min(static_cast<int>(theta / disc.dtheta()), disc.n_angle() - 1);
    const int vel_bin = std::min(static_cast<int>((theta_dot - disc.vel_min()) / disc.dvel()),
                                 disc.n_vel() - 1);
    return StateIndex::grid(angle_bin, vel_bin);
}

std::pair<double, double> cell_center(int angle_bin, int vel_bin, const Discretization& disc) {
    return {(angle_bin + 0.5) * disc.dtheta(), disc.vel_min() + (vel_bin + 0.5) * disc.dvel()};
}

void ActionSet::validate() const {
    if (commands.empty()) throw MdpError("action set must not be empty");
    std::set<ServoCommand> seen(commands.begin(), commands.end());
    if (seen.size() != commands.size()) throw MdpError("action set contains duplicates");
}

ActionSet ActionSet::ico() {
    return {"ICO", {ServoCommand::StepNegative, ServoCommand::StepPositive}};
}
ActionSet ActionSet::a1() { return {"A1", {ServoCommand::SlewToMin, ServoCommand::SlewToMax}}; }
ActionSet ActionSet::a2() {
    return {"A2", {ServoCommand::Idle, ServoCommand::SlewToMin, ServoCommand::SlewToMax}};
}
ActionSet ActionSet::a3() {
    return {"A3", {ServoCommand::StepNegative, ServoCommand::StepPositive, ServoCommand::Idle}};
}

ActionSet ActionSet::preset(const std::string& name) {
    if (name == "ICO") return ico();
    if (name == "A1") return a1();
    if (name == "A2") return a2();
    if (name == "A3") return a3();
    throw MdpError("unknown action set preset '" + name + "'");
}

void ModelConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw MdpError("gamma must lie in (0, 1)");
    if (!(p_explore >= 0.0 && p_explore <= 1.0)) throw MdpError("p_explore must lie in [0, 1]");
    if (!(terminal_penalty <= 0.0)) throw MdpError("terminal penalty must be <= 0");
}

LearnedModel::LearnedModel(std::size_t n_states, std::size_t n_actions, ModelConfig config)
    : n_states_(n_states),
      n_actions_(n_actions),
      config_(config),
      visits_(n_states * n_actions, 0),
      reward_sums_(n_states * n_actions, 0.0),
      successors_(n_states * n_actions),
      values_(n_states, 0.0) {
    if (n_states < 2) throw MdpError("model needs at least one grid state and the terminal");
    if (n_actions == 0) throw MdpError("model needs at least one action");
    config_.validate();
}

void LearnedModel::check_pair(std::size_t s, std::size_t a) const {
    if (s >= n_states_ || a >= n_actions_) throw MdpError("state or action out of range");
}

void LearnedModel::record_transition(std::size_t s, std::size_t a, std::size_t s_next,
                                     double reward) {
    check_pair(s, a);
    if (s == terminal()) throw MdpError("no transitions are recorded out of the terminal state");
    if (s_next >= n_states_) throw MdpError("successor out of range");

    const std::size_t k = slot(s, a);
    ++visits_[k];
    reward_sums_[k] += reward;
    auto& successors = successors_[k];
    for (auto& entry : successors) {
        if (entry.state == s_next) {
            ++entry.count;
            return;
        }
    }
    successors.push_back({static_cast<std::uint32_t>(s_next), 1});
}

std::uint64_t LearnedModel::successor_count(std::size_t s, std::size_t a,
                                            std::size_t s_next) const {
    check_pair(s, a);
    for (const auto& entry : successors_[slot(s, a)]) {
        if (entry.state == s_next) return entry.count;
    }
    return 0;
}

double LearnedModel::mean_reward(std::size_t s, std::size_t a) const {
    check_pair(s, a);
    const std::size_t k = slot(s, a);
    return visits_[k] == 0 ? 0.0 : reward_sums_[k] / static_cast<double>(visits_[k]);
}

double LearnedModel::transition_prob(std::size_t s, std::size_t a, std::size_t s_next) const {
    check_pair(s, a);
    const std::size_t k = slot(s, a);
    if (visits_[k] == 0) return s_next == s ? 1.0 : 0.0;
    return static_cast<double>(successor_count(s, a, s_next)) / static_cast<double>(visits_[k]);
}

double LearnedModel::q_value(std::size_t s, std::size_t a, std::span<const double> values) const {
    const std::size_t k = slot(s, a);
    const std::uint64_t n = visits_[k];
    if (n == 0) return config_.gamma * values[s];
    double expected = 0.0;
    for (const auto& entry : successors_[k]) {
        expected += entry.count * values[entry.state];
    }
    return (reward_sums_[k] + config_.gamma * expected) / static_cast<double>(n);
}

std::size_t LearnedModel::greedy_action(std::size_t s) const {
    check_pair(s, 0);
    std::size_t best = 0;
    double best_q = q_value(s, 0);
    for (std::size_t a = 1; a < n_actions_; ++a) {
        const double q = q_value(s, a);
        if (q > best_q) {
            best_q = q;
            best = a;
        }
    }
    return best;
}

std::vector<double> LearnedModel::bellman_sweep(std::span<const double> values) const {
    if (values.size() != n_states_) throw MdpError("value array has the wrong length");
    std::vector<double> next(n_states_, 0.0);
    for (std::size_t s = 0; s + 1 < n_states_; ++s) {
        double best = q_value(s, 0, values);
        for (std::size_t a = 1; a < n_actions_; ++a) {
            best = std::max(best, q_value(s, a, values));
        }
        next[s] = best;
    }
    return next;
}

SweepReport LearnedModel::policy_iteration(double tolerance, int max_sweeps) {
    SweepReport report;
    std::vector<double> next;
    while (report.sweeps < max_sweeps) {
        next = bellman_sweep(values_);
        double change = 0.0;
        for (std::size_t s = 0; s < n_states_; ++s) {
            change = std::max(change, std::abs(next[s] - values_[s]));
        }
        values_.swap(next);
        ++report.sweeps;
        report.residual = change;
        if (change < tolerance) {
            report.converged = true;
            break;
        }
    }
    return report;
}

void LearnedModel::set_values(std::vector<double> values) {
    if (values.size() != n_states_) throw MdpError("value array has the wrong length");
    values[terminal()] = 0.0;
    values_ = std::move(values);
}

void LearnedModel::scale_rewards(double factor) {
    for (auto& r : reward_sums_) r *= factor;
}

bool LearnedModel::counts_consistent() const {
    for (std::size_t k = 0; k < visits_.size(); ++k) {
        std::uint64_t total = 0;
        for (const auto& entry : successors_[k]) total += entry.count;
        if (total != visits_[k]) return false;
    }
    return true;
}

double Rng::normal() {
    // 1 - uniform() lies in (0, 1], keeping the log finite.
    const double radius = std::sqrt(-2.0 * std::log(1.0 - uniform()));
    return radius * std::cos(kTwoPi * uniform());
}

std::size_t select_action(const LearnedModel& model, std::size_t s, Rng& rng) {
    const std::size_t greedy = model.greedy_action(s);
    const std::size_t n = model.n_actions();
    const double p = model.config().p_explore;
    if (n < 2 || p <= 0.0) return greedy;
    if (rng.uniform() >= p) return greedy;
    const std::size_t pick = rng.below(n - 1);
    return pick < greedy ? pick : pick + 1;
}

}  // namespace acrobot
