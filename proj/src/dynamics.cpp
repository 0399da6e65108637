#include "acrobot/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acrobot {

namespace {

void require(bool condition, const char* message) {
    if (!condition) throw DynamicsError(message);
}

// Generalised coordinates of the link-1 ODE while the servo follows a
// prescribed constant rate.
struct Derivative {
    double theta_dot;
    double theta_ddot;
};

}  // namespace

void PhysicalLayout::validate() const {
    require(j_flywheel >= 0 && m_motor >= 0 && m_battery >= 0 && m_computer >= 0 &&
                m_tip >= 0 && m_rod >= 0,
            "layout masses and inertias must be non-negative");
    require(l_motor > 0 && l_battery > 0 && l_computer > 0 && l_rod > 0,
            "layout lengths must be positive");
}

AcrobotParams AcrobotParams::simplified(double m1, double l1, double m2, double l2,
                                        double d1, double d2, double g) {
    AcrobotParams p;
    p.m1 = m1;
    p.m2 = m2;
    p.l1 = l1;
    p.l2 = l2;
    p.lc1 = l1;
    p.lc2 = l2;
    p.J1 = m1 * l1 * l1;
    p.J2 = m2 * l2 * l2;
    p.d1 = d1;
    p.d2 = d2;
    p.g = g;
    return p;
}

AcrobotParams AcrobotParams::simulation_baseline() {
    return simplified(2.0, 4.0, 2.0, 1.3, 0.08);
}

void AcrobotParams::validate() const {
    require(m1 > 0 && l1 > 0 && l2 > 0 && lc1 > 0 && lc2 > 0 && J1 > 0,
            "m1, l1, l2, lc1, lc2 and J1 must be positive");
    require(m2 >= 0 && J2 >= 0, "m2 and J2 must be non-negative");
    require(d1 >= 0 && d2 >= 0, "damping must be non-negative");
    require(g > 0, "gravity must be positive");
}

void ServoModel::validate() const {
    require(rate > 0, "servo rate must be positive");
    require(u_min < u_max, "servo limits must satisfy u_min < u_max");
}

std::string to_string(ServoCommand command) {
    switch (command) {
        case ServoCommand::StepNegative: return "step_negative";
        case ServoCommand::StepPositive: return "step_positive";
        case ServoCommand::Idle: return "idle";
        case ServoCommand::SlewToMin: return "slew_to_min";
        case ServoCommand::SlewToMax: return "slew_to_max";
    }
    return "unknown";
}

ServoCommand parse_servo_command(const std::string& text) {
    if (text == "step_negative" || text == "a1") return ServoCommand::StepNegative;
    if (text == "step_positive" || text == "a2") return ServoCommand::StepPositive;
    if (text == "idle" || text == "a3") return ServoCommand::Idle;
    if (text == "slew_to_min" || text == "a4") return ServoCommand::SlewToMin;
    if (text == "slew_to_max" || text == "a5") return ServoCommand::SlewToMax;
    throw std::invalid_argument("unknown servo command '" + text + "'");
}

AcrobotParams derive_params(const PhysicalLayout& layout, double d1, double d2, double g) {
    layout.validate();
    constexpr double kSin30 = 0.5;

    AcrobotParams p;
    p.m1 = 2.0 * layout.m_battery + layout.m_motor + layout.m_computer;
    require(p.m1 > 0, "layout carries no mass on the first link");
    const double moment = layout.l_motor * layout.m_motor +
                          layout.l_computer * layout.m_computer -
                          2.0 * layout.l_battery * layout.m_battery * kSin30;
    require(moment > 0, "layout centre of gravity is not on the motor side of the pivot");
    p.lc1 = moment / p.m1;
    p.l1 = layout.l_motor;
    p.J1 = layout.j_flywheel + layout.m_motor * layout.l_motor * layout.l_motor +
           2.0 * layout.m_battery * layout.l_battery * layout.l_battery +
           layout.m_computer * layout.l_computer * layout.l_computer;

    p.m2 = layout.m_tip + layout.m_rod;
    p.l2 = layout.l_rod;
    p.lc2 = layout.l_rod;
    p.J2 = p.m2 * p.l2 * p.l2;

    p.d1 = d1;
    p.d2 = d2;
    p.g = g;
    p.validate();
    return p;
}

double wrap_angle(double angle) {
    double wrapped = std::fmod(angle, kTwoPi);
    if (wrapped < 0) wrapped += kTwoPi;
    // fmod of a tiny negative number can round up to exactly 2pi.
    if (wrapped >= kTwoPi) wrapped = 0.0;
    return wrapped;
}

double theta_accel(const SimState& s, const AcrobotParams& p, double u_ddot) {
    const double su = std::sin(s.u);
    const double cu = std::cos(s.u);
    const double coupling = p.m2 * p.l1 * p.lc2;
    const double lead = p.J1 + p.J2 + p.m2 * p.l1 * p.l1 + 2.0 * coupling * cu;
    if (!(lead > 0)) throw DynamicsError("non-positive inertia in theta equation");

    const double rhs = -p.m2 * p.lc2 * p.g * std::sin(s.theta + s.u) -
                       (p.m1 * p.lc1 + p.m2 * p.l1) * p.g * std::sin(s.theta) +
                       coupling * su * (s.u_dot * s.u_dot + 2.0 * s.theta_dot * s.u_dot) -
                       (p.J2 + coupling * cu) * u_ddot - p.d1 * s.theta_dot;
    return rhs / lead;
}

double required_torque(const SimState& s, const AcrobotParams& p, double theta_ddot,
                       double u_ddot) {
    const double coupling = p.m2 * p.l1 * p.lc2;
    return (p.J2 + coupling * std::cos(s.u)) * theta_ddot + p.J2 * u_ddot +
           coupling * std::sin(s.u) * s.theta_dot * s.theta_dot +
           p.m2 * p.g * p.lc2 * std::sin(s.theta + s.u) + p.d2 * s.u_dot;
}

double servo_rate(ServoCommand command, double u, const ServoModel& servo) {
    switch (command) {
        case ServoCommand::Idle: return 0.0;
        case ServoCommand::StepPositive:
        case ServoCommand::SlewToMax: return u < servo.u_max ? servo.rate : 0.0;
        case ServoCommand::StepNegative:
        case ServoCommand::SlewToMin: return u > servo.u_min ? -servo.rate : 0.0;
    }
    return 0.0;
}

SimState step_rk4_rate(const SimState& state, const AcrobotParams& params, double u_rate,
                       double dt) {
    if (!(dt > 0)) throw DynamicsError("time step must be positive");

    auto derivative = [&](double tau, double theta, double theta_dot) {
        SimState probe;
        probe.theta = theta;
        probe.theta_dot = theta_dot;
        probe.u = state.u + u_rate * tau;
        probe.u_dot = u_rate;
        return Derivative{theta_dot, theta_accel(probe, params, 0.0)};
    };

    const double h = dt;
    const Derivative k1 = derivative(0.0, state.theta, state.theta_dot);
    const Derivative k2 = derivative(0.5 * h, state.theta + 0.5 * h * k1.theta_dot,
                                     state.theta_dot + 0.5 * h * k1.theta_ddot);
    const Derivative k3 = derivative(0.5 * h, state.theta + 0.5 * h * k2.theta_dot,
                                     state.theta_dot + 0.5 * h * k2.theta_ddot);
    const Derivative k4 = derivative(h, state.theta + h * k3.theta_dot,
                                     state.theta_dot + h * k3.theta_ddot);

    SimState next = state;
    next.theta = wrap_angle(state.theta + h / 6.0 *
                                              (k1.theta_dot + 2.0 * k2.theta_dot +
                                               2.0 * k3.theta_dot + k4.theta_dot));
    next.theta_dot = state.theta_dot + h / 6.0 *
                                           (k1.theta_ddot + 2.0 * k2.theta_ddot +
                                            2.0 * k3.theta_ddot + k4.theta_ddot);
    next.u = state.u + u_rate * h;
    next.u_dot = u_rate;
    next.t = state.t + h;
    return next;
}

SimState step_rk4(const SimState& state, const AcrobotParams& params, ServoCommand command,
                  const ServoModel& servo, double dt) {
    const double rate = servo_rate(command, state.u, servo);
    SimState next = step_rk4_rate(state, params, rate, dt);
    if (next.u >= servo.u_max) {
        next.u = servo.u_max;
        next.u_dot = 0.0;
    } else if (next.u <= servo.u_min) {
        next.u = servo.u_min;
        next.u_dot = 0.0;
    }
    return next;
}

double hamiltonian(double theta, double theta_dot, const AcrobotParams& p) {
    const double half = std::sin(0.5 * theta);
    return 0.5 * p.J1 * theta_dot * theta_dot + 2.0 * p.m1 * p.lc1 * p.g * half * half;
}

double total_energy(const SimState& s, const AcrobotParams& p) {
    const double w2 = s.theta_dot + s.u_dot;
    const double kinetic = 0.5 * (p.J1 + p.m2 * p.l1 * p.l1) * s.theta_dot * s.theta_dot +
                           0.5 * p.J2 * w2 * w2 +
                           p.m2 * p.l1 * p.lc2 * std::cos(s.u) * s.theta_dot * w2;
    auto potential = [&](double theta, double u) {
        return -p.m1 * p.lc1 * p.g * std::cos(theta) -
               p.m2 * p.g * (p.l1 * std::cos(theta) + p.lc2 * std::cos(theta + u));
    };
    return kinetic + potential(s.theta, s.u) - potential(0.0, std::numbers::pi);
}

double scaled_hamiltonian(double theta, double theta_dot, double c_exp) {
    const double half = std::sin(0.5 * theta);
    return 0.5 * theta_dot * theta_dot + 2.0 * c_exp * half * half;
}

double estimate_cexp(double theta_meas, double theta_dot_meas) {
    const double half = std::sin(0.5 * theta_meas);
    const double denom = 2.0 * half * half;
    if (denom < 1e-15) throw DynamicsError("turning-point angle too close to zero");
    return 0.5 * theta_dot_meas * theta_dot_meas / denom;
}

double calibrate_energy(double theta_dot_cal) {
    return 0.5 * theta_dot_cal * theta_dot_cal;
}

double separatrix_velocity(double theta, double c_exp) {
    return 2.0 * std::sqrt(c_exp) * std::abs(std::cos(0.5 * theta));
}

}  // namespace acrobot
