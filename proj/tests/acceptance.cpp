#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>
#include <sys/wait.h>

#include "acrobot/calibration.hpp"
#include "acrobot/experiments.hpp"

namespace fs = std::filesystem;
using namespace acrobot;

namespace {

const std::string kCli = ACROBOT_CLI;
const std::string kConfigs = std::string(ACROBOT_SOURCE_DIR) + "/configs/";

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int precision = 6) {
    std::ostringstream out;
    out.precision(precision);
    out << x;
    return out.str();
}

std::string capture(const std::string& command, int& status) {
    std::string output;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) {
        status = -1;
        return output;
    }
    char buffer[256];
    while (std::fgets(buffer, sizeof buffer, pipe)) output += buffer;
    const int raw = pclose(pipe);
    status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return output;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

Verdict state_counts() {
    const auto start = Clock::now();
    const std::pair<const char*, std::size_t> catalog_rows[] = {
        {"ICO", 1441},     {"case1", 1801},    {"case2", 2881},   {"case3", 1801},
        {"case4", 3601},   {"case5", 2251},    {"case6", 7201},   {"case7", 961},
        {"case8", 361},    {"case9", 1201},    {"case10", 721},   {"case11", 1153},
        {"case12", 721},   {"ICO_exp", 1441},  {"C_fine", 1801},  {"C_coarse", 721},
        {"C_idle", 1441},  {"C_long", 1441},   {"C_mass", 1441},
    };
    std::size_t matched = 0;
    std::string mismatch;
    for (const auto& [name, expected] : catalog_rows) {
        const std::size_t got = state_count(find_study(name).env.disc);
        if (got == expected) {
            ++matched;
        } else {
            mismatch += std::string(" ") + name + "=" + std::to_string(got);
        }
    }
    const double elapsed = seconds_since(start);
    return {matched == std::size(catalog_rows) && elapsed < 1.0,
            std::to_string(matched) + "/" + std::to_string(std::size(catalog_rows)) +
                " rows match" + mismatch + ", " + fmt(elapsed, 3) + " s"};
}

Verdict energy_conservation() {
    const auto start = Clock::now();
    AcrobotParams p = AcrobotParams::simulation_baseline();
    p.d1 = 0.0;
    p.d2 = 0.0;
    p.m2 = 0.0;
    p.J2 = 0.0;
    SimState s;
    s.theta = 1.2;
    const double h0 = hamiltonian(s.theta, s.theta_dot, p);
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        s = step_rk4(s, p, ServoCommand::Idle, ServoModel{}, 1e-3);
        worst = std::max(worst, std::abs(hamiltonian(s.theta, s.theta_dot, p) - h0) / h0);
    }
    const double elapsed = seconds_since(start);
    return {worst < 1e-6 && elapsed < 5.0,
            "max |dH|/H0 = " + fmt(worst, 3) + ", " + fmt(elapsed, 3) + " s"};
}

double field(const std::string& text, const std::string& key) {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.starts_with(key + " ")) return std::stod(line.substr(key.size() + 1));
    }
    return std::nan("");
}

Verdict calibration() {
    int status = 0;
    const std::string out = capture("'" + kCli + "' calibrate --config " + kConfigs +
                                        "ico.cfg --set dynamics.d1=0 --set dynamics.m2=0"
                                        " --theta-start 60deg 2>&1",
                                    status);
    const double c = field(out, "c_exp");
    const double h = field(out, "Htilde_theta0");
    const double c_true = 9.81 / 4.0;
    const double theta0 = std::numbers::pi / 3.0;
    const double h_true = 2.0 * c * std::pow(std::sin(theta0 / 2.0), 2);
    const double c_err = std::abs(c - c_true) / c_true;
    const double h_err = std::abs(h - h_true) / h_true;
    return {status == 0 && c_err < 1e-3 && h_err < 1e-3,
            "c_exp = " + fmt(c, 8) + " (err " + fmt(c_err, 3) + "), Htilde_theta0 = " +
                fmt(h, 8) + " (err " + fmt(h_err, 3) + ")"};
}

std::vector<double> solve_policy(const LearnedModel& model, const std::vector<int>& policy) {
    const std::size_t n = 3;
    const double gamma = model.config().gamma;
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        const auto act = static_cast<std::size_t>(policy[s]);
        a[s][s] = 1.0;
        a[s][n] = model.mean_reward(s, act);
        for (std::size_t t = 0; t < n; ++t) a[s][t] -= gamma * model.transition_prob(s, act, t);
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> v(n);
    for (std::size_t s = 0; s < n; ++s) v[s] = a[s][n] / a[s][s];
    return v;
}

Verdict mdp_oracle() {
    LearnedModel model(4, 2, ModelConfig{0.9, 0.1, -100.0});
    model.record_transition(0, 0, 1, -1.0);
    model.record_transition(0, 1, 0, -0.5);
    model.record_transition(1, 0, 2, -2.0);
    model.record_transition(1, 1, 0, -0.2);
    model.record_transition(1, 1, 2, -0.4);
    model.record_transition(2, 0, 2, 0.0);
    model.record_transition(2, 1, 3, -100.0);
    model.policy_iteration(1e-12, 100000);

    std::vector<int> best_policy;
    double best_total = -1e300;
    for (int code = 0; code < 8; ++code) {
        const std::vector<int> policy = {code & 1, (code >> 1) & 1, (code >> 2) & 1};
        const auto v = solve_policy(model, policy);
        const double total = v[0] + v[1] + v[2];
        if (total > best_total) {
            best_total = total;
            best_policy = policy;
        }
    }
    bool policy_ok = true;
    for (std::size_t s = 0; s < 3; ++s) {
        policy_ok &= static_cast<int>(model.greedy_action(s)) == best_policy[s];
    }

    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> value(-50.0, 0.0);
    int contracting = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> v(4), w(4);
        for (std::size_t s = 0; s < 3; ++s) {
            v[s] = value(gen);
            w[s] = value(gen);
        }
        const auto tv = model.bellman_sweep(v);
        const auto tw = model.bellman_sweep(w);
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t s = 0; s < 4; ++s) {
            lhs = std::max(lhs, std::abs(tv[s] - tw[s]));
            rhs = std::max(rhs, std::abs(v[s] - w[s]));
        }
        contracting += lhs <= 0.9 * rhs + 1e-12;
    }
    return {policy_ok && contracting == 100,
            std::string("greedy policy ") + (policy_ok ? "matches" : "differs from") +
                " enumeration, contraction holds on " + std::to_string(contracting) + "/100 pairs"};
}

double window_mean(const std::vector<double>& series, std::size_t first, std::size_t last) {
    double sum = 0.0;
    for (std::size_t e = first; e <= last; ++e) sum += series[e - 1];
    return sum / static_cast<double>(last - first + 1);
}

Verdict ico_convergence() {
    const auto start = Clock::now();
    const StudyConfig& cfg = find_study("ICO");
    const StudyResult result = run_study(cfg);
    const double target = cfg.env.reward.energy_target;
    double energy = 0.0;
    int improving = 0;
    std::size_t ok_runs = 0;
    for (const auto& run : result.runs) {
        if (!run.ok()) continue;
        ++ok_runs;
        energy += window_mean(run.energy, 251, 300);
        const auto lc = moving_average(run.curve);
        improving += lc[299] > lc[29];
    }
    energy /= static_cast<double>(std::max<std::size_t>(ok_runs, 1));
    const double rel = std::abs(energy - target) / target;
    return {ok_runs == 10 && rel <= 0.15 && improving >= 9,
            "mean energy eps 251-300 = " + fmt(energy, 5) + " vs target " + fmt(target, 5) +
                " (" + fmt(100 * rel, 3) + "%), LC30(300) > LC30(30) in " +
                std::to_string(improving) + "/10 runs, " + fmt(seconds_since(start), 4) + " s"};
}

Verdict curve_sign() {
    const auto start = Clock::now();
    std::size_t configs = 0, values = 0, positive = 0, failed = 0;
    for (StudyConfig cfg : catalog()) {
        cfg.episode.n_episodes = 5;
        cfg.n_runs = 1;
        const StudyResult result = run_study(cfg, StudyOptions{1});
        ++configs;
        for (const auto& run : result.runs) {
            if (!run.ok()) ++failed;
            for (double v : run.curve) {
                ++values;
                positive += v > 0.0;
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {positive == 0 && failed == 0 && elapsed < 120.0,
            std::to_string(values) + " values over " + std::to_string(configs) + " configs, " +
                std::to_string(positive) + " positive, " + std::to_string(failed) +
                " failed runs, " + fmt(elapsed, 4) + " s"};
}

Verdict episode_accounting() {
    std::string detail;
    bool pass = true;
    for (const char* name : {"el1", "el2", "el3", "el4"}) {
        const auto& ep = find_study(name).episode;
        const std::size_t product = ep.steps_per_episode * ep.n_episodes;
        pass &= product == 30'000'000;
        detail += std::string(detail.empty() ? "" : ", ") + name + " " +
                  std::to_string(ep.steps_per_episode) + " x " + std::to_string(ep.n_episodes) +
                  " = " + std::to_string(product);
    }
    return {pass, detail};
}

Verdict rotation_control() {
    const auto start = Clock::now();
    StudyConfig cfg = find_study("rotation");
    cfg.episode.n_episodes = 50;
    cfg.n_runs = 5;
    const StudyResult result = run_study(cfg);
    int passing = 0;
    std::string fractions;
    for (const auto& run : result.runs) {
        if (!run.ok()) continue;
        const auto lc = moving_average(run.curve);
        const bool pass = run.rotation_fraction >= 0.5 && lc[49] > lc[9];
        passing += pass;
        fractions += " " + fmt(run.rotation_fraction, 3) + (pass ? "" : "*");
    }
    return {passing >= 4, std::to_string(passing) + "/5 seeds pass (rotation fractions" +
                              fractions + "), " + fmt(seconds_since(start), 3) + " s"};
}

Verdict determinism() {
    const fs::path root = fs::temp_directory_path() / "acrobot_acceptance";
    fs::remove_all(root);
    const std::string args = "'" + kCli + "' train --config " + kConfigs +
                             "ico_exp.cfg --runs 2 --seed 11 --set episode.episodes=10 --out ";
    int s1 = 0, s2 = 0;
    capture(args + (root / "a").string() + " 2>&1", s1);
    capture(args + (root / "b").string() + " 2>&1", s2);
    std::size_t compared = 0, identical = 0;
    for (const auto& entry : fs::directory_iterator(root / "a")) {
        if (entry.path().extension() != ".csv") continue;
        ++compared;
        identical += slurp(entry.path()) == slurp(root / "b" / entry.path().filename());
    }
    return {s1 == 0 && s2 == 0 && compared >= 6 && identical == compared,
            std::to_string(identical) + "/" + std::to_string(compared) +
                " CSV files byte-identical"};
}

Verdict exploration_rate() {
    LearnedModel model(3, 3, ModelConfig{0.9, 0.1, -1.0});
    model.record_transition(0, 1, 1, 0.0);
    model.record_transition(0, 0, 1, -1.0);
    model.record_transition(0, 2, 1, -1.0);
    model.policy_iteration();
    const std::size_t greedy = model.greedy_action(0);
    Rng rng(99);
    std::size_t other = 0;
    const std::size_t draws = 100000;
    for (std::size_t i = 0; i < draws; ++i) other += select_action(model, 0, rng) != greedy;
    const double rate = static_cast<double>(other) / draws;
    return {greedy == 1 && std::abs(rate - 0.1) <= 0.01,
            "non-greedy frequency " + fmt(rate, 5) + " over 1e5 draws"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
        {"state-count tables", state_counts},
        {"energy conservation", energy_conservation},
        {"calibration", calibration},
        {"MDP oracle", mdp_oracle},
        {"ICO convergence", ico_convergence},
        {"learning-curve sign", curve_sign},
        {"episode-length accounting", episode_accounting},
        {"rotation control", rotation_control},
        {"determinism", determinism},
        {"exploration rate", exploration_rate},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += !v.pass;
        std::cout << (v.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first
                  << ": " << v.detail << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria pass"
              << std::endl;
    return failures == 0 ? 0 : 1;
}
