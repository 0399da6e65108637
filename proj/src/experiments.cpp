#include "acrobot/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace acrobot {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Layout damping for the desk rig; the rig's damping was never measured.
constexpr double kLayoutDamping = 0.002;

void size_terminal_penalty(StudyConfig& cfg) {
    const double penalty = default_terminal_penalty(cfg.env.reward, cfg.env.disc);
    cfg.env.reward.terminal_penalty = penalty;
    cfg.model.terminal_penalty = penalty;
}

StudyConfig simulation_baseline() {
    StudyConfig cfg;
    cfg.name = "ICO";
    cfg.env.params = AcrobotParams::simulation_baseline();
    cfg.env.servo = ServoModel{};
    cfg.env.disc = Discretization(10.0, -5.0, 5.0, 0.25);
    cfg.env.actions = ActionSet::ico();
    const double c = cfg.env.params.natural_cexp();  // g / l1
    cfg.env.reward = RewardSpec::energy_scaled(1.3 * c, c, 0.0);
    cfg.episode.dt_control = 0.01;
    cfg.episode.substeps = 1;
    cfg.episode.steps_per_episode = 100000;
    cfg.episode.n_episodes = 300;
    cfg.model = ModelConfig{0.9, 0.1, 0.0};
    cfg.n_runs = 10;
    cfg.base_seed = 1;
    size_terminal_penalty(cfg);
    return cfg;
}

StudyConfig with_grid(StudyConfig cfg, std::string name, double dtheta_deg, double dvel) {
    cfg.name = std::move(name);
    cfg.env.disc = Discretization(dtheta_deg, cfg.env.disc.vel_min(), cfg.env.disc.vel_max(), dvel);
    size_terminal_penalty(cfg);
    return cfg;
}

StudyConfig with_episode_length(StudyConfig cfg, std::string name, std::size_t steps) {
    constexpr std::size_t kTotalSteps = 30'000'000;
    cfg.name = std::move(name);
    cfg.episode.steps_per_episode = steps;
    cfg.episode.n_episodes = kTotalSteps / steps;
    return cfg;
}

StudyConfig with_actions(StudyConfig cfg, std::string name, ActionSet actions) {
    cfg.name = std::move(name);
    cfg.env.actions = std::move(actions);
    return cfg;
}

StudyConfig with_second_mass(StudyConfig cfg, std::string name, double m2) {
    cfg.name = std::move(name);
    cfg.env.params.m2 = m2;
    cfg.env.params.J2 = m2 * cfg.env.params.l2 * cfg.env.params.l2;
    return cfg;
}

StudyConfig experimental_baseline(const PhysicalLayout& layout = PhysicalLayout{}) {
    StudyConfig cfg;
    cfg.name = "ICO_exp";
    cfg.env.params = derive_params(layout, kLayoutDamping, 0.0);
    cfg.env.servo = ServoModel{std::numbers::pi, 90.0 * kDeg, 270.0 * kDeg};
    cfg.env.disc = Discretization(10.0, -5.0, 5.0, 0.25);
    cfg.env.actions = ActionSet::ico();
    cfg.env.reward = RewardSpec::energy_scaled(4.4, cfg.env.params.natural_cexp(), 0.0);
    cfg.episode.dt_control = 0.1;
    cfg.episode.substeps = 10;
    cfg.episode.steps_per_episode = 400;
    cfg.episode.n_episodes = 100;
    cfg.model = ModelConfig{0.9, 0.1, 0.0};
    cfg.n_runs = 2;
    cfg.base_seed = 1;
    cfg.phase_split = 20.0;
    size_terminal_penalty(cfg);
    return cfg;
}

StudyConfig double_length(StudyConfig cfg, std::string name) {
    cfg.name = std::move(name);
    cfg.episode.steps_per_episode *= 2;
    return cfg;
}

PhysicalLayout heavy_tip_layout() {
    PhysicalLayout layout;
    layout.m_tip *= 2.0;
    return layout;
}

StudyConfig rotation_study() {
    StudyConfig cfg = experimental_baseline(heavy_tip_layout());
    cfg.name = "rotation";
    cfg.env.disc = Discretization(20.0, -10.0, 10.0, 0.5);
    const double c = cfg.env.params.natural_cexp();
    cfg.env.reward = RewardSpec::rotation(default_rotation_target(c), c, 0.0);
    cfg.episode.steps_per_episode = 2000;
    cfg.episode.n_episodes = 50;
    cfg.n_runs = 5;
    size_terminal_penalty(cfg);
    return cfg;
}

std::vector<StudyConfig> build_catalog() {
    std::vector<StudyConfig> out;
    const StudyConfig ico = simulation_baseline();
    out.push_back(ico);

    struct Grid {
        const char* name;
        double dtheta_deg;
        double dvel;
    };
    constexpr Grid kCases[] = {
        {"case1", 8, 0.25},   {"case2", 5, 0.25},   {"case3", 10, 0.2},  {"case4", 10, 0.1},
        {"case5", 8, 0.2},    {"case6", 5, 0.1},    {"case7", 12, 0.3125}, {"case8", 20, 0.5},
        {"case9", 12, 0.25},  {"case10", 20, 0.25}, {"case11", 10, 0.3125}, {"case12", 10, 0.5},
    };
    for (const Grid& g : kCases) out.push_back(with_grid(ico, g.name, g.dtheta_deg, g.dvel));

    out.push_back(with_episode_length(ico, "el1", 50000));
    out.push_back(with_episode_length(ico, "el2", 80000));
    out.push_back(with_episode_length(ico, "el3", 120000));
    out.push_back(with_episode_length(ico, "el4", 200000));

    out.push_back(with_actions(ico, "A1", ActionSet::a1()));
    out.push_back(with_actions(ico, "A2", ActionSet::a2()));
    out.push_back(with_actions(ico, "A3", ActionSet::a3()));

    out.push_back(with_second_mass(ico, "m2_1", 1.0));
    out.push_back(with_second_mass(ico, "m2_1.5", 1.5));
    out.push_back(with_second_mass(ico, "m2_3", 3.0));
    out.push_back(with_second_mass(ico, "m2_4", 4.0));

    const StudyConfig exp = experimental_baseline();
    out.push_back(exp);
    out.push_back(with_grid(exp, "C_fine", 10, 0.2));
    const StudyConfig coarse = with_grid(exp, "C_coarse", 20, 0.25);
    out.push_back(coarse);
    ActionSet extended = ActionSet::a3();
    extended.name = "A_extended";
    out.push_back(with_actions(exp, "C_idle", extended));
    out.push_back(double_length(exp, "C_long"));

    StudyConfig heavy = experimental_baseline(heavy_tip_layout());
    heavy.name = "C_mass";
    out.push_back(heavy);

    StudyConfig coarse_long = double_length(coarse, "C_coarse_long");
    coarse_long.n_runs = 10;
    out.push_back(coarse_long);
    out.push_back(with_actions(coarse_long, "C_coarse_long_idle", extended));

    out.push_back(rotation_study());
    return out;
}

}  // namespace

double StudyConfig::reporting_cexp() const {
    return env.reward.c_exp > 0.0 ? env.reward.c_exp : env.params.natural_cexp();
}

void StudyConfig::validate() const {
    env.validate();
    episode.validate();
    model.validate();
    if (n_runs < 1) throw std::invalid_argument("a study needs at least one run");
    if (phase_split && !(*phase_split > 0.0 && *phase_split < episode.episode_duration())) {
        throw std::invalid_argument("phase split must lie inside the episode");
    }
    if (env.reward.objective == Objective::Rotation &&
        env.reward.theta_dot_target > std::max(std::abs(env.disc.vel_min()),
                                               std::abs(env.disc.vel_max()))) {
        throw std::invalid_argument("rotation target lies outside the velocity band");
    }
    if (env.reward.objective == Objective::Energy) {
        const double kinetic = env.reward.mode == EnergyMode::Raw
                                   ? 2.0 * env.reward.energy_target / env.params.J1
                                   : 2.0 * env.reward.energy_target;
        const double speed = std::sqrt(kinetic);
        if (speed > env.disc.vel_max() || -speed < env.disc.vel_min()) {
            throw std::invalid_argument(
                "energy target needs a speed at theta = 0 outside the velocity band");
        }
    }
}

const std::vector<StudyConfig>& catalog() {
    static const std::vector<StudyConfig> entries = build_catalog();
    return entries;
}

const StudyConfig& find_study(const std::string& name) {
    for (const auto& cfg : catalog()) {
        if (cfg.name == name) return cfg;
    }
    throw std::out_of_range("no catalog study named '" + name + "'");
}

std::vector<double> moving_average(std::span<const double> series, std::size_t window) {
    if (window < 1) throw std::invalid_argument("moving average window must be >= 1");
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t first = i + 1 > window ? i + 1 - window : 0;
        double sum = 0.0;
        for (std::size_t j = first; j <= i; ++j) sum += series[j];
        out[i] = sum / static_cast<double>(i + 1 - first);
    }
    return out;
}

CurveStats aggregate(std::span<const std::vector<double>> curves) {
    CurveStats stats;
    if (curves.empty()) return stats;
    const std::size_t length = curves.front().size();
    for (const auto& c : curves) {
        if (c.size() != length) throw std::invalid_argument("curves must have equal length");
    }
    const auto n = static_cast<double>(curves.size());
    stats.mean.assign(length, 0.0);
    stats.std.assign(length, 0.0);
    for (std::size_t i = 0; i < length; ++i) {
        double sum = 0.0;
        for (const auto& c : curves) sum += c[i];
        const double mean = sum / n;
        double squares = 0.0;
        for (const auto& c : curves) squares += (c[i] - mean) * (c[i] - mean);
        stats.mean[i] = mean;
        stats.std[i] = curves.size() > 1 ? std::sqrt(squares / (n - 1.0)) : 0.0;
    }
    return stats;
}

PhaseSplit split_phase(const EpisodeRecord& record, double t_split) {
    double early = 0.0;
    double late = 0.0;
    std::size_t n_early = 0;
    std::size_t n_late = 0;
    for (const StepLog& step : record.steps) {
        if (step.t <= t_split + 1e-9) {
            early += step.reward;
            ++n_early;
        } else {
            late += step.reward;
            ++n_late;
        }
    }
    if (n_early == 0 || n_late == 0) {
        throw std::invalid_argument("phase split time must fall inside the episode");
    }
    return {early / static_cast<double>(n_early), late / static_cast<double>(n_late)};
}

double rotation_fraction(const EpisodeRecord& record, double c_exp) {
    if (record.steps.empty()) return 0.0;
    std::size_t rotating = 0;
    for (const StepLog& step : record.steps) {
        if (std::abs(step.theta_dot) > separatrix_velocity(step.theta, c_exp)) ++rotating;
    }
    return static_cast<double>(rotating) / static_cast<double>(record.steps.size());
}

namespace {

RunOutcome execute_run(const StudyConfig& config, std::size_t run) {
    RunOutcome outcome;
    outcome.seed = config.run_seed(run);
    try {
        const std::size_t last = config.episode.n_episodes - 1;
        auto observer = [&](std::size_t episode, const EpisodeRecord& record) {
            if (config.phase_split) outcome.phases.push_back(split_phase(record, *config.phase_split));
            if (episode == last) outcome.final_episode = record;
        };
        TrainResult trained =
            train(config.env, config.episode, config.model, outcome.seed, observer);
        outcome.curve = std::move(trained.curve);
        outcome.energy = std::move(trained.energy);
        outcome.values.assign(trained.model.values().begin(), trained.model.values().end());
        outcome.unconverged_updates = static_cast<int>(
            std::count_if(trained.sweeps.begin(), trained.sweeps.end(),
                          [](const SweepReport& r) { return !r.converged; }));
        outcome.rotation_fraction =
            rotation_fraction(outcome.final_episode, config.reporting_cexp());
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
    return outcome;
}

}  // namespace

StudyResult run_study(const StudyConfig& config, const StudyOptions& options) {
    config.validate();

    StudyResult result;
    result.config = config;
    result.runs.resize(config.n_runs);

    std::size_t threads = options.threads;
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, config.n_runs);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t run = next++; run < config.n_runs; run = next++) {
            result.runs[run] = execute_run(config, run);
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }

    std::vector<std::vector<double>> curves;
    for (const auto& run : result.runs) {
        if (run.ok()) curves.push_back(run.curve);
    }
    CurveStats stats = aggregate(curves);
    result.mean = std::move(stats.mean);
    result.std = std::move(stats.std);
    result.lc30 = moving_average(result.mean, 30);
    return result;
}

}  // namespace acrobot
