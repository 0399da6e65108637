#include "acrobot/calibration.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace acrobot {

namespace {

double signed_angle(double theta) {
    return theta > std::numbers::pi ? theta - kTwoPi : theta;
}

bool crosses_zero_angle(const SimState& a, const SimState& b) {
    const double pa = signed_angle(a.theta);
    const double pb = signed_angle(b.theta);
    // Excludes the branch cut at theta = pi.
    return pa * pb <= 0.0 && std::abs(pa - pb) < std::numbers::pi && pa != pb;
}

bool velocity_reverses(const SimState& a, const SimState& b) {
    return a.theta_dot * b.theta_dot < 0.0 || (b.theta_dot == 0.0 && a.theta_dot != 0.0);
}

// Bisects the sub-step length tau in (0, dt] until the event predicate
// brackets to machine precision. Returns the state at the event.
SimState locate_event(const SimState& from, const AcrobotParams& params, double dt,
                      const std::function<bool(const SimState&, const SimState&)>& event) {
    double lo = 0.0;
    double hi = dt;
    SimState at_hi = step_rk4_rate(from, params, 0.0, hi);
    for (int i = 0; i < 80 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        const SimState at_mid = step_rk4_rate(from, params, 0.0, mid);
        if (event(from, at_mid)) {
            hi = mid;
            at_hi = at_mid;
        } else {
            lo = mid;
        }
    }
    return at_hi;
}

}  // namespace

CalibrationReport simulate_calibration(const AcrobotParams& params, double theta_start,
                                       double dt, double timeout) {
    params.validate();
    if (!(theta_start > 0.0 && theta_start < std::numbers::pi)) {
        throw DynamicsError("release angle must lie in (0, pi)");
    }
    if (!(dt > 0.0)) throw DynamicsError("time step must be positive");

    CalibrationReport report;
    report.theta_start = theta_start;

    SimState state;
    state.theta = theta_start;
    state.theta_dot = 0.0;
    state.u = std::numbers::pi;
    state.u_dot = 0.0;

    enum class Phase { FirstCrossing, TurningPoint, SecondCrossing };
    Phase phase = Phase::FirstCrossing;

    while (state.t < timeout) {
        const SimState next = step_rk4_rate(state, params, 0.0, dt);
        switch (phase) {
            case Phase::FirstCrossing:
                if (crosses_zero_angle(state, next)) {
                    const SimState hit = locate_event(state, params, dt, crosses_zero_angle);
                    report.theta_dot_cal = std::abs(hit.theta_dot);
                    report.energy_theta0 = calibrate_energy(report.theta_dot_cal);
                    phase = Phase::TurningPoint;
                }
                break;
            case Phase::TurningPoint:
                if (velocity_reverses(state, next)) {
                    const SimState hit = locate_event(state, params, dt, velocity_reverses);
                    report.theta_meas = signed_angle(hit.theta);
                    phase = Phase::SecondCrossing;
                }
                break;
            case Phase::SecondCrossing:
                if (crosses_zero_angle(state, next)) {
                    const SimState hit = locate_event(state, params, dt, crosses_zero_angle);
                    report.theta_dot_meas = std::abs(hit.theta_dot);
                    report.c_exp = estimate_cexp(report.theta_meas, report.theta_dot_meas);
                    return report;
                }
                break;
        }
        state = next;
    }
    throw DynamicsError("calibration timed out before the pendulum passed theta = 0");
}

}  // namespace acrobot
