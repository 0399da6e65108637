#pragma once

#include <stdexcept>
#include <string>

#include "acrobot/csv.hpp"

namespace acrobot {

class PlotError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PlotKind { LearningCurve, Phase, Energy, ValueFunction };

/// Accepts "learning-curve", "phase", "energy", "value-function".
PlotKind parse_plot_kind(const std::string& text);
std::string to_string(PlotKind kind);

/// Renders a self-contained SVG document.
///
/// - LearningCurve: `aggregate.csv` (mean and lc30 over episode) or
///   `learning_curve.csv` (run 0 with its 30-episode moving average).
/// - Phase: trajectory CSV, theta against theta_dot; the polyline is broken
///   where theta wraps.
/// - Energy: `energy.csv`, mean over runs per episode.
/// - ValueFunction: `angle_bin,vel_bin,value` as a heat grid.
///
/// Throws PlotError when the table does not match the kind or has no rows.
std::string render_svg(const CsvTable& table, PlotKind kind, const std::string& title = "");

}  // namespace acrobot
