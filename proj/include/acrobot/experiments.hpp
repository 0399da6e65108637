#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acrobot/agent.hpp"

namespace acrobot {

/// A named, fully parameterised learning experiment.
struct StudyConfig {
    std::string name = "ICO";
    Environment env;
    EpisodeConfig episode;
    ModelConfig model;
    std::size_t n_runs = 10;
    std::uint64_t base_seed = 1;
    /// Split time for swing-up / hold statistics; none when empty.
    std::optional<double> phase_split;

    /// c_exp the study reports energies and the separatrix in.
    double reporting_cexp() const;
    std::uint64_t run_seed(std::size_t run) const { return base_seed + run; }

    void validate() const;
    bool operator==(const StudyConfig&) const = default;
};

struct PhaseSplit {
    double swing_up = 0.0;
    double hold = 0.0;
};

struct RunOutcome {
    std::uint64_t seed = 0;
    std::vector<double> curve;
    std::vector<double> energy;
    std::vector<PhaseSplit> phases;  ///< empty unless the study splits phases
    std::vector<double> values;      ///< final value function, flat indices
    EpisodeRecord final_episode;
    /// Fraction of final-episode steps outside the separatrix.
    double rotation_fraction = 0.0;
    int unconverged_updates = 0;
    std::optional<std::string> error;

    bool ok() const { return !error.has_value(); }
};

struct StudyResult {
    StudyConfig config;
    std::vector<RunOutcome> runs;
    std::vector<double> mean;
    std::vector<double> std;
    std::vector<double> lc30;  ///< moving average of the mean curve
};

/// Every built-in study configuration.
const std::vector<StudyConfig>& catalog();
/// Throws std::out_of_range for an unknown name.
const StudyConfig& find_study(const std::string& name);

/// Trailing mean over min(window, i + 1) elements.
std::vector<double> moving_average(std::span<const double> series, std::size_t window = 30);

struct CurveStats {
    std::vector<double> mean;
    std::vector<double> std;  ///< sample standard deviation (n - 1); 0 for one curve
};

/// Per-episode statistics over equally long curves.
CurveStats aggregate(std::span<const std::vector<double>> curves);

/// Mean reward of the steps ending at or before `t_split` and of the rest.
PhaseSplit split_phase(const EpisodeRecord& record, double t_split = 20.0);

/// Share of steps whose |theta_dot| exceeds the separatrix velocity.
double rotation_fraction(const EpisodeRecord& record, double c_exp);

struct StudyOptions {
    std::size_t threads = 0;  ///< 0: hardware concurrency
};

/// Runs n_runs seeded trainings concurrently and aggregates them. A failing
/// run is reported in its RunOutcome and excluded from the statistics.
StudyResult run_study(const StudyConfig& config, const StudyOptions& options = {});

}  // namespace acrobot
