#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace acrobot {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown when physical parameters or states violate their invariants.
class DynamicsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mounted components of the desk-scale rig. All masses in kg, lengths in m.
struct PhysicalLayout {
    double j_flywheel = 0.036;  ///< flywheel inertia about the pivot [kg m^2]
    double m_motor = 0.158;     ///< servo motor incl. extra weight
    double l_motor = 0.26;      ///< pivot to servo axis (= link-1 length)
    double m_battery = 0.133;   ///< one battery cell (two are mounted)
    double l_battery = 0.15;
    double m_computer = 0.042;
    double l_computer = 0.07;
    double m_tip = 0.038;       ///< point mass at the end of the rod
    double m_rod = 0.042;
    double l_rod = 0.1;         ///< rod length (= link-2 length)

    void validate() const;
};

/// Constants entering the equations of motion and the first-link Hamiltonian.
///
/// `J1` is the inertia of link 1 about the pivot and `J2` the inertia of
/// link 2 about the servo axis. `m2 == 0` describes the bare first pendulum
/// with the second link detached.
struct AcrobotParams {
    double m1 = 2.0;
    double m2 = 2.0;
    double l1 = 4.0;
    double l2 = 1.3;
    double lc1 = 4.0;
    double lc2 = 1.3;
    double J1 = 32.0;
    double J2 = 3.38;
    double d1 = 0.08;
    double d2 = 0.0;
    double g = 9.81;

    /// Point masses at the link tips: lc = l, J1 = m1 l1^2, J2 = m2 l2^2.
    static AcrobotParams simplified(double m1, double l1, double m2, double l2,
                                    double d1, double d2 = 0.0, double g = 9.81);

    /// Simulation baseline: m1 = 2 kg, l1 = 4 m, l2 = 1.3 m, m2 = 2 kg, d1 = 0.08 N m s.
    static AcrobotParams simulation_baseline();

    /// Proportionality constant of the scaled Hamiltonian, m1 lc1 g / J1.
    /// Equals g / l1 for the simplified model.
    double natural_cexp() const { return m1 * lc1 * g / J1; }

    void validate() const;
    bool operator==(const AcrobotParams&) const = default;
};

struct SimState {
    double theta = 0.0;  ///< first pendulum angle, wrapped to [0, 2pi)
    double theta_dot = 0.0;
    double u = std::numbers::pi;  ///< relative angle of the second link
    double u_dot = 0.0;
    double t = 0.0;
};

struct ServoModel {
    double rate = std::numbers::pi;  ///< slew rate [rad/s]
    double u_min = 0.5 * std::numbers::pi;
    double u_max = 1.5 * std::numbers::pi;

    void validate() const;
    bool operator==(const ServoModel&) const = default;
};

/// Servo commands a1..a5.
enum class ServoCommand {
    StepNegative,  // a1
    StepPositive,  // a2
    Idle,          // a3
    SlewToMin,     // a4
    SlewToMax,     // a5
};

std::string to_string(ServoCommand command);
/// Accepts "step_negative", "a1", ... Throws std::invalid_argument.
ServoCommand parse_servo_command(const std::string& text);

/// Lumps the rig into link parameters. The battery pair sits on ribs at
/// +-120 deg from the motor arm, so their moment arm along the motor axis is
/// -l_battery sin(30 deg).
AcrobotParams derive_params(const PhysicalLayout& layout, double d1, double d2,
                            double g = 9.81);

double wrap_angle(double angle);

/// Angular acceleration of link 1 for a prescribed servo acceleration.
double theta_accel(const SimState& state, const AcrobotParams& params, double u_ddot);

/// Servo torque M_u consistent with the given accelerations (diagnostic only).
double required_torque(const SimState& state, const AcrobotParams& params,
                       double theta_ddot, double u_ddot);

/// Kinematic servo rate for a command. Zero when the command would push u
/// past a limit.
double servo_rate(ServoCommand command, double u, const ServoModel& servo);

/// One classical RK4 step of (theta, theta_dot). The servo angle moves at a
/// constant rate during the step and is clamped to its limits.
SimState step_rk4(const SimState& state, const AcrobotParams& params,
                  ServoCommand command, const ServoModel& servo, double dt);

/// RK4 step with an explicitly prescribed servo rate (no limit logic).
SimState step_rk4_rate(const SimState& state, const AcrobotParams& params,
                       double u_rate, double dt);

/// First-pendulum energy 1/2 J1 theta_dot^2 + 2 m1 lc1 g sin^2(theta/2).
double hamiltonian(double theta, double theta_dot, const AcrobotParams& params);

/// Mechanical energy of both links (kinetic plus potential, zero at the
/// hanging rest position with u = pi). Conserved when d1 = 0 and u is frozen.
double total_energy(const SimState& state, const AcrobotParams& params);

/// Parameter-free energy proxy 1/2 theta_dot^2 + 2 c_exp sin^2(theta/2).
double scaled_hamiltonian(double theta, double theta_dot, double c_exp);

/// c_exp from a turning-point angle and the velocity measured at theta = 0.
double estimate_cexp(double theta_meas, double theta_dot_meas);

/// Scaled energy from the velocity measured at theta = 0.
double calibrate_energy(double theta_dot_cal);

/// |theta_dot| on the separatrix H~ = 2 c_exp at angle theta.
double separatrix_velocity(double theta, double c_exp);

}  // namespace acrobot
