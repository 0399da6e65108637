#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "acrobot/calibration.hpp"
#include "acrobot/config.hpp"
#include "acrobot/csv.hpp"
#include "acrobot/experiments.hpp"
#include "acrobot/svg.hpp"

#ifndef ACROBOT_VERSION
#define ACROBOT_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using namespace acrobot;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

/// Input problems that map to the usage exit code.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    std::vector<std::string> configs;
    std::vector<std::string> overrides;
    std::string out = "out";
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

/// A path to a config file, or the name of a catalog study.
StudyConfig load_config(const std::string& source, const std::vector<std::string>& overrides) {
    std::vector<ConfigOverride> parsed;
    for (const auto& o : overrides) parsed.push_back(ConfigOverride::parse(o));

    std::string text;
    std::string origin = source;
    if (fs::is_regular_file(source)) {
        text = read_file(source);
    } else {
        try {
            text = serialize_config(find_study(source));
            origin = "catalog study " + source;
        } catch (const std::out_of_range&) {
            throw UsageError("config '" + source + "' is neither a file nor a catalog study");
        }
    }
    try {
        return parse_config(text, parsed);
    } catch (const ConfigError& e) {
        throw UsageError(origin + ": " + e.what());
    }
}

std::optional<std::uint64_t> env_seed() {
    const char* value = std::getenv("ACROBOT_SEED");
    if (!value || !*value) return std::nullopt;
    std::uint64_t seed = 0;
    const std::string_view text(value);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), seed);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw UsageError("ACROBOT_SEED must be a non-negative integer, got '" + std::string(text) +
                         "'");
    }
    return seed;
}

void apply_run_options(StudyConfig& config, const RunOptions& options, std::size_t default_runs) {
    if (options.seed) {
        config.base_seed = *options.seed;
    } else if (const auto seed = env_seed()) {
        config.base_seed = *seed;
    }
    if (options.runs) {
        if (*options.runs < 1) throw UsageError("--runs must be at least 1");
        config.n_runs = *options.runs;
    } else if (default_runs > 0) {
        config.n_runs = default_runs;
    }
}

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buffer[32];
    std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buffer;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

double tail_mean(const std::vector<double>& series, std::size_t count) {
    if (series.empty()) return 0.0;
    const std::size_t first = series.size() > count ? series.size() - count : 0;
    double sum = 0.0;
    for (std::size_t i = first; i < series.size(); ++i) sum += series[i];
    return sum / static_cast<double>(series.size() - first);
}

void write_outputs(const StudyResult& result, const fs::path& dir, double wall_seconds) {
    fs::create_directories(dir);
    const StudyConfig& config = result.config;
    write_csv_file((dir / "learning_curve.csv").string(), learning_curve_table(result));
    write_csv_file((dir / "aggregate.csv").string(), aggregate_table(result));
    write_csv_file((dir / "energy.csv").string(), energy_table(result));
    if (config.phase_split) {
        write_csv_file((dir / "phase_split.csv").string(), phase_split_table(result));
    }
    const RunOutcome& first = result.runs.front();
    write_csv_file((dir / "value_function.csv").string(),
                   value_function_table(first.values, config.env.disc));
    write_csv_file((dir / "trajectory.csv").string(),
                   trajectory_table(first.final_episode, config.env.params,
                                    config.reporting_cexp()));

    std::ostringstream manifest;
    manifest << "study: " << config.name << "\n"
             << "seed: " << config.base_seed << "\n"
             << "runs: " << config.n_runs << "\n"
             << "version: " << ACROBOT_VERSION << "\n"
             << "finished: " << timestamp() << "\n"
             << "wall_time_s: " << format_number(std::round(wall_seconds * 1000.0) / 1000.0)
             << "\n"
             << "\n# config\n"
             << serialize_config(config);
    write_text(dir / "manifest.txt", manifest.str());
}

void report(const StudyResult& result, const fs::path& dir) {
    std::cout << result.config.name << ": " << result.runs.size() << " run(s), "
              << result.mean.size() << " episodes -> " << dir.string() << "\n";
    if (!result.lc30.empty()) {
        std::cout << "  final LC30 " << result.lc30.back() << "\n";
    }
    std::vector<double> energy_mean(result.mean.size(), 0.0);
    for (const auto& run : result.runs) {
        for (std::size_t e = 0; e < run.energy.size() && e < energy_mean.size(); ++e) {
            energy_mean[e] += run.energy[e] / static_cast<double>(result.runs.size());
        }
    }
    std::cout << "  mean energy over the last 50 episodes " << tail_mean(energy_mean, 50) << "\n";
    if (result.config.env.reward.objective == Objective::Rotation) {
        for (const auto& run : result.runs) {
            std::cout << "  seed " << run.seed << " rotation fraction " << run.rotation_fraction
                      << "\n";
        }
    }
}

int execute(StudyConfig config, const RunOptions& options, const fs::path& dir) {
    const auto start = std::chrono::steady_clock::now();
    const StudyResult result = run_study(config, StudyOptions{options.threads});
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    bool failed = false;
    for (const auto& run : result.runs) {
        if (!run.ok()) {
            std::cerr << "error: run with seed " << run.seed << " failed: " << *run.error << "\n";
            failed = true;
        }
    }
    if (failed) return kExitRuntime;
    write_outputs(result, dir, wall);
    report(result, dir);
    return kExitOk;
}

int cmd_list() {
    for (const auto& cfg : catalog()) {
        std::cout << cfg.name << "  states=" << cfg.env.disc.state_count()
                  << " actions=" << cfg.env.actions.size()
                  << " steps=" << cfg.episode.steps_per_episode
                  << " episodes=" << cfg.episode.n_episodes << " runs=" << cfg.n_runs << "\n";
    }
    return kExitOk;
}

int cmd_train(const RunOptions& options) {
    if (options.configs.size() != 1) throw UsageError("train takes exactly one --config");
    StudyConfig config = load_config(options.configs.front(), options.overrides);
    apply_run_options(config, options, 1);
    return execute(std::move(config), options, options.out);
}

int cmd_study(const RunOptions& options) {
    std::vector<StudyConfig> configs;
    for (const auto& source : options.configs) {
        StudyConfig config = load_config(source, options.overrides);
        apply_run_options(config, options, 0);
        configs.push_back(std::move(config));
    }
    for (const auto& config : configs) {
        const int status = execute(config, options, fs::path(options.out) / config.name);
        if (status != kExitOk) return status;
    }
    return kExitOk;
}

double parse_angle(const std::string& text) {
    std::string number = text;
    double factor = 1.0;
    for (const auto& [suffix, scale] :
         {std::pair<std::string, double>{"deg", std::numbers::pi / 180.0}, {"rad", 1.0}}) {
        if (number.size() > suffix.size() && number.ends_with(suffix)) {
            number.resize(number.size() - suffix.size());
            factor = scale;
            break;
        }
    }
    while (!number.empty() && number.back() == ' ') number.pop_back();
    try {
        return parse_number(number) * factor;
    } catch (const std::invalid_argument&) {
        throw UsageError("'" + text + "' is not an angle (e.g. 60deg or 1.05rad)");
    }
}

int cmd_calibrate(const RunOptions& options, const std::string& theta_text, double dt,
                  double timeout) {
    if (options.configs.size() != 1) throw UsageError("calibrate takes exactly one --config");
    const StudyConfig config = load_config(options.configs.front(), options.overrides);
    const double theta_start = parse_angle(theta_text);
    if (!(theta_start > 0.0 && theta_start < std::numbers::pi)) {
        throw UsageError("--theta-start must lie strictly between 0 and 180 deg");
    }
    const CalibrationReport r = simulate_calibration(config.env.params, theta_start, dt, timeout);
    std::cout.precision(10);
    std::cout << "theta_start " << r.theta_start << " rad\n"
              << "theta_dot_cal " << r.theta_dot_cal << " rad/s\n"
              << "theta_meas " << r.theta_meas << " rad\n"
              << "theta_dot_meas " << r.theta_dot_meas << " rad/s\n"
              << "c_exp " << r.c_exp << "\n"
              << "Htilde_theta0 " << r.energy_theta0 << "\n"
              << "natural_c_exp " << config.env.params.natural_cexp() << "\n";
    return kExitOk;
}

int cmd_plot(const std::string& csv, const std::string& kind, std::string out,
             const std::string& title) {
    const PlotKind plot_kind = [&] {
        try {
            return parse_plot_kind(kind);
        } catch (const PlotError& e) {
            throw UsageError(e.what());
        }
    }();
    if (!fs::is_regular_file(csv)) throw UsageError("cannot read '" + csv + "'");
    const CsvTable table = read_csv_file(csv);
    const std::string svg = render_svg(table, plot_kind, title);
    if (out.empty()) out = fs::path(csv).replace_extension(".svg").string();
    write_text(out, svg);
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

void add_run_options(CLI::App* cmd, RunOptions& options, bool multiple_configs) {
    auto* config = cmd->add_option("-c,--config", options.configs,
                                   "config file or catalog study name")
                       ->required();
    if (!multiple_configs) config->expected(1);
    cmd->add_option("--set", options.overrides, "override, section.key=value");
    cmd->add_option("-o,--out", options.out, "output directory");
    cmd->add_option("--runs", options.runs, "number of seeded runs");
    cmd->add_option("--seed", options.seed, "base seed (default: ACROBOT_SEED, then config)");
    cmd->add_option("--threads", options.threads, "worker threads, 0 for all cores");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acrobot simulator and model-based reinforcement learning"};
    app.set_version_flag("--version", ACROBOT_VERSION);
    app.require_subcommand(1);

    RunOptions options;
    auto* list = app.add_subcommand("list-configs", "list catalog studies");
    auto* train = app.add_subcommand("train", "train one configuration");
    add_run_options(train, options, false);
    auto* study = app.add_subcommand("study", "run studies into OUT/NAME");
    add_run_options(study, options, true);

    auto* calibrate = app.add_subcommand("calibrate", "estimate c_exp from a free release");
    std::string theta_start = "60deg";
    double cal_dt = 1e-3;
    double cal_timeout = 600.0;
    calibrate->add_option("-c,--config", options.configs, "config file or catalog study name")
        ->required()
        ->expected(1);
    calibrate->add_option("--set", options.overrides, "override, section.key=value");
    calibrate->add_option("--theta-start", theta_start, "release angle, e.g. 60deg");
    calibrate->add_option("--dt", cal_dt, "integration step [s]");
    calibrate->add_option("--timeout", cal_timeout, "simulated time limit [s]");

    auto* plot = app.add_subcommand("plot", "render a CSV as SVG");
    std::string csv;
    std::string kind;
    std::string svg_out;
    std::string title;
    plot->add_option("csv", csv, "input CSV")->required();
    plot->add_option("-k,--kind", kind, "learning-curve, phase, energy or value-function")
        ->required();
    plot->add_option("-o,--out", svg_out, "output SVG (default: CSV path with .svg)");
    plot->add_option("--title", title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*list) return cmd_list();
        if (*train) return cmd_train(options);
        if (*study) return cmd_study(options);
        if (*calibrate) return cmd_calibrate(options, theta_start, cal_dt, cal_timeout);
        if (*plot) return cmd_plot(csv, kind, svg_out, title);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
