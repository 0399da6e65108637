#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <sstream>

#include "acrobot/calibration.hpp"
#include "acrobot/config.hpp"
#include "acrobot/csv.hpp"
#include "acrobot/svg.hpp"

namespace py = pybind11;
using namespace acrobot;

namespace {

py::dict outcome_dict(const RunOutcome& run) {
    py::dict d;
    d["seed"] = run.seed;
    d["curve"] = run.curve;
    d["energy"] = run.energy;
    d["values"] = run.values;
    d["rotation_fraction"] = run.rotation_fraction;
    d["unconverged_updates"] = run.unconverged_updates;
    d["error"] = run.error ? py::object(py::str(*run.error)) : py::object(py::none());
    return d;
}

std::vector<ConfigOverride> parse_overrides(const std::vector<std::string>& items) {
    std::vector<ConfigOverride> overrides;
    for (const auto& item : items) overrides.push_back(ConfigOverride::parse(item));
    return overrides;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Acrobot dynamics, tabular model learning and experiment runner";

    py::register_exception<DynamicsError>(m, "DynamicsError", PyExc_RuntimeError);
    py::register_exception<MdpError>(m, "MdpError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<PlotError>(m, "PlotError", PyExc_ValueError);
    py::register_exception<CsvError>(m, "CsvError", PyExc_ValueError);

    py::class_<AcrobotParams>(m, "AcrobotParams")
        .def(py::init<>())
        .def_static("simulation_baseline", &AcrobotParams::simulation_baseline)
        .def_static("simplified", &AcrobotParams::simplified, py::arg("m1"), py::arg("l1"),
                    py::arg("m2"), py::arg("l2"), py::arg("d1"), py::arg("d2") = 0.0,
                    py::arg("g") = 9.81)
        .def_readwrite("m1", &AcrobotParams::m1)
        .def_readwrite("m2", &AcrobotParams::m2)
        .def_readwrite("l1", &AcrobotParams::l1)
        .def_readwrite("l2", &AcrobotParams::l2)
        .def_readwrite("lc1", &AcrobotParams::lc1)
        .def_readwrite("lc2", &AcrobotParams::lc2)
        .def_readwrite("J1", &AcrobotParams::J1)
        .def_readwrite("J2", &AcrobotParams::J2)
        .def_readwrite("d1", &AcrobotParams::d1)
        .def_readwrite("d2", &AcrobotParams::d2)
        .def_readwrite("g", &AcrobotParams::g)
        .def("natural_cexp", &AcrobotParams::natural_cexp)
        .def("validate", &AcrobotParams::validate)
        .def(py::self == py::self);

    py::class_<SimState>(m, "SimState")
        .def(py::init([](double theta, double theta_dot, double u, double u_dot) {
                 SimState s;
                 s.theta = theta;
                 s.theta_dot = theta_dot;
                 s.u = u;
                 s.u_dot = u_dot;
                 return s;
             }),
             py::arg("theta") = 0.0, py::arg("theta_dot") = 0.0,
             py::arg("u") = std::numbers::pi, py::arg("u_dot") = 0.0)
        .def_readwrite("theta", &SimState::theta)
        .def_readwrite("theta_dot", &SimState::theta_dot)
        .def_readwrite("u", &SimState::u)
        .def_readwrite("u_dot", &SimState::u_dot);

    py::class_<ServoModel>(m, "ServoModel")
        .def(py::init<>())
        .def_readwrite("rate", &ServoModel::rate)
        .def_readwrite("u_min", &ServoModel::u_min)
        .def_readwrite("u_max", &ServoModel::u_max);

    py::enum_<ServoCommand>(m, "ServoCommand")
        .value("StepNegative", ServoCommand::StepNegative)
        .value("StepPositive", ServoCommand::StepPositive)
        .value("Idle", ServoCommand::Idle)
        .value("SlewToMin", ServoCommand::SlewToMin)
        .value("SlewToMax", ServoCommand::SlewToMax);

    m.def("theta_accel", &theta_accel, py::arg("state"), py::arg("params"),
          py::arg("u_ddot") = 0.0);
    m.def("step_rk4", &step_rk4, py::arg("state"), py::arg("params"), py::arg("command"),
          py::arg("servo"), py::arg("dt"));
    m.def("hamiltonian", &hamiltonian, py::arg("theta"), py::arg("theta_dot"), py::arg("params"));
    m.def("scaled_hamiltonian", &scaled_hamiltonian, py::arg("theta"), py::arg("theta_dot"),
          py::arg("c_exp"));
    m.def("estimate_cexp", &estimate_cexp, py::arg("theta_meas"), py::arg("theta_dot_meas"));
    m.def("separatrix_velocity", &separatrix_velocity, py::arg("theta"), py::arg("c_exp"));

    py::class_<CalibrationReport>(m, "CalibrationReport")
        .def_readonly("theta_start", &CalibrationReport::theta_start)
        .def_readonly("theta_dot_cal", &CalibrationReport::theta_dot_cal)
        .def_readonly("energy_theta0", &CalibrationReport::energy_theta0)
        .def_readonly("theta_meas", &CalibrationReport::theta_meas)
        .def_readonly("theta_dot_meas", &CalibrationReport::theta_dot_meas)
        .def_readonly("c_exp", &CalibrationReport::c_exp);
    m.def("simulate_calibration", &simulate_calibration, py::arg("params"),
          py::arg("theta_start"), py::arg("dt") = 1e-3, py::arg("timeout") = 600.0);

    py::class_<Discretization>(m, "Discretization")
        .def(py::init<>())
        .def(py::init<double, double, double, double>(), py::arg("dtheta_deg"),
             py::arg("vel_min"), py::arg("vel_max"), py::arg("dvel"))
        .def_property_readonly("dtheta_deg", &Discretization::dtheta_deg)
        .def_property_readonly("vel_min", &Discretization::vel_min)
        .def_property_readonly("vel_max", &Discretization::vel_max)
        .def_property_readonly("dvel", &Discretization::dvel)
        .def_property_readonly("n_angle", &Discretization::n_angle)
        .def_property_readonly("n_vel", &Discretization::n_vel)
        .def_property_readonly("terminal_index", &Discretization::terminal_index)
        .def("state_count", &Discretization::state_count);
    m.def("state_count", [](const Discretization& d) { return d.state_count(); });
    m.def(
        "discretize",
        [](double theta, double theta_dot, const Discretization& d) {
            return discretize(theta, theta_dot, d).flat(d);
        },
        py::arg("theta"), py::arg("theta_dot"), py::arg("disc"),
        "Flat state index; the terminal index for velocities outside the band.");

    py::class_<StudyConfig>(m, "StudyConfig")
        .def_readwrite("name", &StudyConfig::name)
        .def_readwrite("n_runs", &StudyConfig::n_runs)
        .def_readwrite("base_seed", &StudyConfig::base_seed)
        .def_readwrite("phase_split", &StudyConfig::phase_split)
        .def_property(
            "params", [](const StudyConfig& c) { return c.env.params; },
            [](StudyConfig& c, const AcrobotParams& p) { c.env.params = p; })
        .def_property(
            "disc", [](const StudyConfig& c) { return c.env.disc; },
            [](StudyConfig& c, const Discretization& d) { c.env.disc = d; })
        .def_property(
            "steps_per_episode", [](const StudyConfig& c) { return c.episode.steps_per_episode; },
            [](StudyConfig& c, std::size_t n) { c.episode.steps_per_episode = n; })
        .def_property(
            "n_episodes", [](const StudyConfig& c) { return c.episode.n_episodes; },
            [](StudyConfig& c, std::size_t n) { c.episode.n_episodes = n; })
        .def_property_readonly("dt_control",
                               [](const StudyConfig& c) { return c.episode.dt_control; })
        .def_property(
            "gamma", [](const StudyConfig& c) { return c.model.gamma; },
            [](StudyConfig& c, double g) { c.model.gamma = g; })
        .def_property(
            "p_explore", [](const StudyConfig& c) { return c.model.p_explore; },
            [](StudyConfig& c, double p) { c.model.p_explore = p; })
        .def_property_readonly("energy_target",
                               [](const StudyConfig& c) { return c.env.reward.energy_target; })
        .def_property_readonly("terminal_penalty",
                               [](const StudyConfig& c) { return c.env.reward.terminal_penalty; })
        .def_property_readonly("actions",
                               [](const StudyConfig& c) {
                                   std::vector<std::string> names;
                                   for (auto cmd : c.env.actions.commands) {
                                       names.push_back(to_string(cmd));
                                   }
                                   return names;
                               })
        .def("reporting_cexp", &StudyConfig::reporting_cexp)
        .def("validate", &StudyConfig::validate)
        .def("__repr__", [](const StudyConfig& c) { return "<StudyConfig " + c.name + ">"; });

    m.def("catalog", [] { return catalog(); });
    m.def("find_study", &find_study, py::arg("name"));
    m.def(
        "parse_config",
        [](const std::string& text, const std::vector<std::string>& overrides) {
            return parse_config(text, parse_overrides(overrides));
        },
        py::arg("text"), py::arg("overrides") = std::vector<std::string>{});
    m.def("serialize_config", &serialize_config, py::arg("config"));

    m.def(
        "train",
        [](const StudyConfig& c, std::uint64_t seed) {
            TrainResult r = [&] {
                py::gil_scoped_release release;
                return train(c.env, c.episode, c.model, seed);
            }();
            py::dict d;
            d["curve"] = r.curve;
            d["energy"] = r.energy;
            d["values"] = std::vector<double>(r.model.values().begin(), r.model.values().end());
            return d;
        },
        py::arg("config"), py::arg("seed"));
    m.def(
        "run_study",
        [](const StudyConfig& c, std::size_t threads) {
            StudyResult r = [&] {
                py::gil_scoped_release release;
                return run_study(c, StudyOptions{threads});
            }();
            py::dict d;
            d["mean"] = r.mean;
            d["std"] = r.std;
            d["lc30"] = r.lc30;
            py::list runs;
            for (const auto& run : r.runs) runs.append(outcome_dict(run));
            d["runs"] = runs;
            return d;
        },
        py::arg("config"), py::arg("threads") = 0);
    m.def(
        "moving_average",
        [](const std::vector<double>& series, std::size_t window) {
            return moving_average(series, window);
        },
        py::arg("series"), py::arg("window") = 30);
    m.def(
        "render_svg",
        [](const std::string& csv_text, const std::string& kind, const std::string& title) {
            std::istringstream in(csv_text);
            return render_svg(read_csv(in), parse_plot_kind(kind), title);
        },
        py::arg("csv_text"), py::arg("kind"), py::arg("title") = "");
}
