#pragma once

#include "acrobot/dynamics.hpp"

namespace acrobot {

/// Outcome of a simulated release-and-measure calibration.
struct CalibrationReport {
    double theta_start = 0.0;
    double theta_dot_cal = 0.0;   ///< |theta_dot| at the first pass through theta = 0
    double energy_theta0 = 0.0;   ///< 1/2 theta_dot_cal^2
    double theta_meas = 0.0;      ///< signed angle at the first turning point after release
    double theta_dot_meas = 0.0;  ///< |theta_dot| at the next pass through theta = 0
    double c_exp = 0.0;
};

/// Releases the unactuated pendulum from rest at `theta_start` (servo frozen
/// at u = pi) and measures the quantities needed to identify c_exp.
/// Events are located to sub-step precision by bisection.
/// Throws DynamicsError if the events do not occur before `timeout`.
CalibrationReport simulate_calibration(const AcrobotParams& params, double theta_start,
                                       double dt = 1e-3, double timeout = 600.0);

}  // namespace acrobot
