#include "acrobot/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include "acrobot/csv.hpp"

namespace acrobot {

ConfigError::ConfigError(std::size_t line, const std::string& message)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message
                              : "config: " + message),
      line_(line) {}

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

const std::vector<std::string> kSections = {"dynamics", "episode", "discretization",
                                            "actions",  "reward",  "study"};

std::string trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r");
    return std::string(text.substr(first, last - first + 1));
}

struct Entry {
    std::string value;
    std::size_t line = 0;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

struct RawConfig {
    std::map<std::string, Section> sections;
};

RawConfig parse_raw(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    Section* current = nullptr;
    while (std::getline(in, line)) {
        ++line_no;
        const auto comment = line.find('#');
        const std::string content = trim(comment == std::string::npos
                                             ? std::string_view(line)
                                             : std::string_view(line).substr(0, comment));
        if (content.empty()) continue;

        if (content.front() == '[') {
            if (content.back() != ']') throw ConfigError(line_no, "unterminated section header");
            const std::string name = trim(std::string_view(content).substr(1, content.size() - 2));
            if (std::find(kSections.begin(), kSections.end(), name) == kSections.end()) {
                throw ConfigError(line_no, "unknown section [" + name + "]");
            }
            if (raw.sections.contains(name)) {
                throw ConfigError(line_no, "duplicate section [" + name + "]");
            }
            current = &raw.sections[name];
            continue;
        }

        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected 'key = value'");
        if (!current) throw ConfigError(line_no, "key outside of any section");
        const std::string key = trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "missing key before '='");
        if (value.empty()) throw ConfigError(line_no, "missing value for '" + key + "'");
        if (current->contains(key)) throw ConfigError(line_no, "duplicate key '" + key + "'");
        (*current)[key] = Entry{value, line_no, false};
    }
    return raw;
}

enum class Unit { Angle, Rate, Time, Mass, Length, Inertia, Damping, Plain };

double unit_factor(Unit kind, const std::string& unit) {
    if (unit.empty()) return 1.0;
    switch (kind) {
        case Unit::Angle:
            if (unit == "rad") return 1.0;
            if (unit == "deg") return kDeg;
            break;
        case Unit::Rate:
            if (unit == "rad/s") return 1.0;
            if (unit == "deg/s") return kDeg;
            break;
        case Unit::Time:
            if (unit == "s") return 1.0;
            if (unit == "ms") return 1e-3;
            break;
        case Unit::Mass:
            if (unit == "kg") return 1.0;
            break;
        case Unit::Length:
            if (unit == "m") return 1.0;
            break;
        case Unit::Inertia:
            if (unit == "kgm^2" || unit == "kg*m^2") return 1.0;
            break;
        case Unit::Damping:
            if (unit == "Nms" || unit == "N*m*s") return 1.0;
            break;
        case Unit::Plain:
            break;
    }
    return 0.0;
}

// Typed access to one section; tracks which keys were consumed.
class Reader {
public:
    Reader(Section& section, std::string name) : section_(section), name_(std::move(name)) {}

    bool has(const std::string& key) const { return section_.contains(key); }

    std::size_t line(const std::string& key) const {
        const auto it = section_.find(key);
        return it == section_.end() ? 0 : it->second.line;
    }

    std::optional<std::string> text(const std::string& key) {
        const auto it = section_.find(key);
        if (it == section_.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    double number(const std::string& key, Unit kind, double fallback) {
        return optional_number(key, kind).value_or(fallback);
    }

    std::optional<double> optional_number(const std::string& key, Unit kind) {
        const auto value = text(key);
        if (!value) return std::nullopt;
        const auto space = value->find_first_of(" \t");
        const std::string number = value->substr(0, space);
        const std::string unit = space == std::string::npos ? "" : trim(value->substr(space));
        const double factor = unit_factor(kind, unit);
        if (factor == 0.0) fail(key, "unit '" + unit + "' is not valid here");
        try {
            const double parsed = parse_number(number);
            if (!std::isfinite(parsed)) fail(key, "value must be finite");
            return parsed * factor;
        } catch (const std::invalid_argument&) {
            fail(key, "'" + *value + "' is not a number");
        }
    }

    /// Number, or std::nullopt when the value is the given keyword.
    std::optional<double> number_or(const std::string& key, Unit kind, const std::string& keyword) {
        const auto it = section_.find(key);
        if (it != section_.end() && it->second.value == keyword) {
            it->second.used = true;
            return std::nullopt;
        }
        return optional_number(key, kind);
    }

    std::size_t count(const std::string& key, std::size_t fallback) {
        const auto value = text(key);
        if (!value) return fallback;
        std::size_t parsed = 0;
        const auto* begin = value->data();
        const auto* end = begin + value->size();
        const auto [ptr, ec] = std::from_chars(begin, end, parsed);
        if (ec != std::errc{} || ptr != end) fail(key, "'" + *value + "' is not a whole number");
        return parsed;
    }

    std::string word(const std::string& key, const std::string& fallback,
                     const std::vector<std::string>& allowed) {
        const auto value = text(key);
        if (!value) return fallback;
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), *value) == allowed.end()) {
            fail(key, "'" + *value + "' is not one of the accepted values");
        }
        return *value;
    }

    void finish(const std::string& context = "") const {
        for (const auto& [key, entry] : section_) {
            if (!entry.used) {
                throw ConfigError(entry.line, "unknown key '" + key + "' in [" + name_ + "]" +
                                                  (context.empty() ? "" : " " + context));
            }
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const {
        throw ConfigError(line(key), key + ": " + message);
    }

private:
    Section& section_;
    std::string name_;
};

void apply_overrides(RawConfig& raw, const std::vector<ConfigOverride>& overrides) {
    for (const auto& o : overrides) {
        if (std::find(kSections.begin(), kSections.end(), o.section) == kSections.end()) {
            throw ConfigError(0, "override names unknown section '" + o.section + "'");
        }
        auto& section = raw.sections[o.section];
        section[o.key] = Entry{o.value, section.contains(o.key) ? section[o.key].line : 0, false};
    }
}

AcrobotParams read_dynamics(Reader& r, ServoModel& servo) {
    const std::string model = r.word("model", "simplified", {"simplified", "layout", "explicit"});
    const double d1 = r.number("d1", Unit::Damping, 0.0);
    const double d2 = r.number("d2", Unit::Damping, 0.0);
    const double g = r.number("g", Unit::Plain, 9.81);

    AcrobotParams params;
    if (model == "simplified") {
        params = AcrobotParams::simplified(r.number("m1", Unit::Mass, 2.0),
                                           r.number("l1", Unit::Length, 4.0),
                                           r.number("m2", Unit::Mass, 2.0),
                                           r.number("l2", Unit::Length, 1.3), d1, d2, g);
    } else if (model == "layout") {
        PhysicalLayout layout;
        layout.j_flywheel = r.number("j_flywheel", Unit::Inertia, layout.j_flywheel);
        layout.m_motor = r.number("m_motor", Unit::Mass, layout.m_motor);
        layout.l_motor = r.number("l_motor", Unit::Length, layout.l_motor);
        layout.m_battery = r.number("m_battery", Unit::Mass, layout.m_battery);
        layout.l_battery = r.number("l_battery", Unit::Length, layout.l_battery);
        layout.m_computer = r.number("m_computer", Unit::Mass, layout.m_computer);
        layout.l_computer = r.number("l_computer", Unit::Length, layout.l_computer);
        layout.m_tip = r.number("m_tip", Unit::Mass, layout.m_tip);
        layout.m_rod = r.number("m_rod", Unit::Mass, layout.m_rod);
        layout.l_rod = r.number("l_rod", Unit::Length, layout.l_rod);
        try {
            params = derive_params(layout, d1, d2, g);
        } catch (const DynamicsError& e) {
            throw ConfigError(0, std::string("[dynamics] ") + e.what());
        }
    } else {
        const AcrobotParams base;
        params.m1 = r.number("m1", Unit::Mass, base.m1);
        params.m2 = r.number("m2", Unit::Mass, base.m2);
        params.l1 = r.number("l1", Unit::Length, base.l1);
        params.l2 = r.number("l2", Unit::Length, base.l2);
        params.lc1 = r.number("lc1", Unit::Length, base.lc1);
        params.lc2 = r.number("lc2", Unit::Length, base.lc2);
        params.J1 = r.number("J1", Unit::Inertia, base.J1);
        params.J2 = r.number("J2", Unit::Inertia, base.J2);
        params.d1 = d1;
        params.d2 = d2;
        params.g = g;
    }

    const ServoModel defaults;
    servo.rate = r.number("servo_rate", Unit::Rate, defaults.rate);
    servo.u_min = r.number("u_min", Unit::Angle, defaults.u_min);
    servo.u_max = r.number("u_max", Unit::Angle, defaults.u_max);
    r.finish("for model '" + model + "'");
    return params;
}

Discretization read_discretization(Reader& r) {
    double dtheta_deg = 10.0;
    if (r.has("dtheta")) {
        const std::size_t line = r.line("dtheta");
        const std::string value = *r.text("dtheta");
        const auto space = value.find_first_of(" \t");
        const std::string unit = space == std::string::npos ? "" : trim(value.substr(space));
        try {
            const double number = parse_number(value.substr(0, space));
            if (unit == "deg") {
                dtheta_deg = number;
            } else if (unit.empty() || unit == "rad") {
                dtheta_deg = number / kDeg;
            } else {
                throw ConfigError(line, "dtheta: unit '" + unit + "' is not valid here");
            }
        } catch (const std::invalid_argument&) {
            throw ConfigError(line, "dtheta: '" + value + "' is not a number");
        }
    }
    const double vel_min = r.number("vel_min", Unit::Rate, -5.0);
    const double vel_max = r.number("vel_max", Unit::Rate, 5.0);
    const double dvel = r.number("dvel", Unit::Rate, 0.25);
    r.finish();
    try {
        return Discretization(dtheta_deg, vel_min, vel_max, dvel);
    } catch (const MdpError& e) {
        const std::string msg = e.what();
        const std::size_t line = msg.find("angular") != std::string::npos ? r.line("dtheta")
                                                                          : r.line("dvel");
        throw ConfigError(line, std::string("[discretization] ") + msg);
    }
}

ActionSet read_actions(Reader& r) {
    const bool has_preset = r.has("preset");
    const bool has_commands = r.has("commands");
    if (has_preset && has_commands) {
        r.fail("commands", "give either 'preset' or 'commands', not both");
    }
    ActionSet actions = ActionSet::ico();
    if (has_preset) {
        const std::string name = *r.text("preset");
        try {
            actions = ActionSet::preset(name);
        } catch (const MdpError& e) {
            r.fail("preset", e.what());
        }
    } else if (has_commands) {
        actions = ActionSet{"custom", {}};
        std::istringstream list(*r.text("commands"));
        std::string item;
        while (std::getline(list, item, ',')) {
            try {
                actions.commands.push_back(parse_servo_command(trim(item)));
            } catch (const std::invalid_argument& e) {
                r.fail("commands", e.what());
            }
        }
    }
    if (const auto name = r.text("name")) actions.name = *name;
    r.finish();
    try {
        actions.validate();
    } catch (const MdpError& e) {
        r.fail("commands", e.what());
    }
    return actions;
}

EpisodeConfig read_episode(Reader& r) {
    EpisodeConfig ep;
    ep.dt_control = r.number("dt", Unit::Time, 0.01);
    const auto default_substeps =
        static_cast<std::size_t>(std::max(1.0, std::round(ep.dt_control / 0.01)));
    ep.substeps = static_cast<int>(r.count("substeps", default_substeps));
    ep.steps_per_episode = r.count("steps", ep.steps_per_episode);
    ep.n_episodes = r.count("episodes", ep.n_episodes);
    ep.theta0_min = r.number("theta0_min", Unit::Angle, ep.theta0_min);
    ep.theta0_max = r.number("theta0_max", Unit::Angle, ep.theta0_max);
    ep.u0 = r.number("u0", Unit::Angle, ep.u0);
    ep.terminal_mode = r.word("terminal_mode", "reset", {"reset", "end"}) == "end"
                           ? TerminalMode::EndEpisode
                           : TerminalMode::Reset;
    ep.noise_theta = r.number("noise_theta", Unit::Angle, 0.0);
    ep.noise_theta_dot = r.number("noise_theta_dot", Unit::Rate, 0.0);
    r.finish();
    return ep;
}

/// Plain number, or a multiple of c_exp written as `1.3 c_exp`.
std::optional<double> energy_target(Reader& r, double c_exp) {
    if (!r.has("energy_target")) return std::nullopt;
    const std::string value = *r.text("energy_target");
    const auto space = value.find_first_of(" \t");
    const std::string unit = space == std::string::npos ? "" : trim(value.substr(space));
    if (!unit.empty() && unit != "c_exp") {
        r.fail("energy_target", "unit '" + unit + "' is not valid here");
    }
    try {
        const double number = parse_number(value.substr(0, space));
        return unit.empty() ? number : number * c_exp;
    } catch (const std::invalid_argument&) {
        r.fail("energy_target", "'" + value + "' is not a number");
    }
}

RewardSpec read_reward(Reader& r, const AcrobotParams& params, const Discretization& disc) {
    const std::string objective = r.word("objective", "energy", {"energy", "rotation"});
    const double c_exp = r.number_or("c_exp", Unit::Plain, "auto").value_or(params.natural_cexp());

    RewardSpec spec;
    if (objective == "energy") {
        const std::string mode = r.word("mode", "scaled", {"scaled", "raw"});
        const auto target = energy_target(r, c_exp);
        if (!target) throw ConfigError(0, "[reward] energy objective needs 'energy_target'");
        spec = mode == "raw" ? RewardSpec::energy_raw(*target, params, 0.0)
                             : RewardSpec::energy_scaled(*target, c_exp, 0.0);
    } else {
        const double target = r.number_or("theta_dot_target", Unit::Rate, "auto")
                                  .value_or(default_rotation_target(c_exp));
        spec = RewardSpec::rotation(target, c_exp, 0.0);
    }
    const auto penalty = r.number_or("terminal_penalty", Unit::Plain, "auto");
    r.finish("for objective '" + objective + "'");
    spec.terminal_penalty = penalty ? *penalty : default_terminal_penalty(spec, disc);
    return spec;
}

}  // namespace

ConfigOverride ConfigOverride::parse(const std::string& text) {
    const auto eq = text.find('=');
    const auto dot = text.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ConfigError(0, "override '" + text + "' must look like section.key=value");
    }
    ConfigOverride o{trim(text.substr(0, dot)), trim(text.substr(dot + 1, eq - dot - 1)),
                     trim(text.substr(eq + 1))};
    if (o.section.empty() || o.key.empty() || o.value.empty()) {
        throw ConfigError(0, "override '" + text + "' must look like section.key=value");
    }
    return o;
}

StudyConfig parse_config(const std::string& text, const std::vector<ConfigOverride>& overrides) {
    RawConfig raw = parse_raw(text);
    for (const auto& name : kSections) {
        if (!raw.sections.contains(name)) {
            throw ConfigError(0, "missing required section [" + name + "]");
        }
    }
    apply_overrides(raw, overrides);

    StudyConfig cfg;
    Reader dynamics(raw.sections["dynamics"], "dynamics");
    cfg.env.params = read_dynamics(dynamics, cfg.env.servo);

    Reader discretization(raw.sections["discretization"], "discretization");
    cfg.env.disc = read_discretization(discretization);

    Reader actions(raw.sections["actions"], "actions");
    cfg.env.actions = read_actions(actions);

    Reader episode(raw.sections["episode"], "episode");
    cfg.episode = read_episode(episode);

    Reader reward(raw.sections["reward"], "reward");
    cfg.env.reward = read_reward(reward, cfg.env.params, cfg.env.disc);

    Reader study(raw.sections["study"], "study");
    cfg.name = study.word("name", "custom", {});
    cfg.n_runs = study.count("runs", cfg.n_runs);
    cfg.base_seed = study.count("seed", cfg.base_seed);
    cfg.model.gamma = study.number("gamma", Unit::Plain, cfg.model.gamma);
    cfg.model.p_explore = study.number("p_explore", Unit::Plain, cfg.model.p_explore);
    if (const auto split = study.number_or("phase_split", Unit::Time, "none")) {
        cfg.phase_split = *split;
    }
    study.finish();
    cfg.model.terminal_penalty = cfg.env.reward.terminal_penalty;

    try {
        cfg.validate();
    } catch (const std::exception& e) {
        throw ConfigError(0, e.what());
    }
    return cfg;
}

std::string serialize_config(const StudyConfig& cfg) {
    const auto n = [](double v) { return format_number(v); };
    const AcrobotParams& p = cfg.env.params;
    std::ostringstream out;

    out << "[dynamics]\n"
        << "model = explicit\n"
        << "m1 = " << n(p.m1) << " kg\n"
        << "m2 = " << n(p.m2) << " kg\n"
        << "l1 = " << n(p.l1) << " m\n"
        << "l2 = " << n(p.l2) << " m\n"
        << "lc1 = " << n(p.lc1) << " m\n"
        << "lc2 = " << n(p.lc2) << " m\n"
        << "J1 = " << n(p.J1) << " kgm^2\n"
        << "J2 = " << n(p.J2) << " kgm^2\n"
        << "d1 = " << n(p.d1) << " Nms\n"
        << "d2 = " << n(p.d2) << " Nms\n"
        << "g = " << n(p.g) << "\n"
        << "servo_rate = " << n(cfg.env.servo.rate) << " rad/s\n"
        << "u_min = " << n(cfg.env.servo.u_min) << " rad\n"
        << "u_max = " << n(cfg.env.servo.u_max) << " rad\n\n";

    const Discretization& d = cfg.env.disc;
    out << "[discretization]\n"
        << "dtheta = " << n(d.dtheta_deg()) << " deg\n"
        << "vel_min = " << n(d.vel_min()) << " rad/s\n"
        << "vel_max = " << n(d.vel_max()) << " rad/s\n"
        << "dvel = " << n(d.dvel()) << " rad/s\n\n";

    out << "[actions]\nname = " << cfg.env.actions.name << "\ncommands = ";
    for (std::size_t i = 0; i < cfg.env.actions.size(); ++i) {
        out << (i ? ", " : "") << to_string(cfg.env.actions[i]);
    }
    out << "\n\n";

    const EpisodeConfig& e = cfg.episode;
    out << "[episode]\n"
        << "dt = " << n(e.dt_control) << " s\n"
        << "substeps = " << e.substeps << "\n"
        << "steps = " << e.steps_per_episode << "\n"
        << "episodes = " << e.n_episodes << "\n"
        << "theta0_min = " << n(e.theta0_min) << " rad\n"
        << "theta0_max = " << n(e.theta0_max) << " rad\n"
        << "u0 = " << n(e.u0) << " rad\n"
        << "terminal_mode = " << (e.terminal_mode == TerminalMode::EndEpisode ? "end" : "reset")
        << "\n"
        << "noise_theta = " << n(e.noise_theta) << " rad\n"
        << "noise_theta_dot = " << n(e.noise_theta_dot) << " rad/s\n\n";

    const RewardSpec& r = cfg.env.reward;
    out << "[reward]\n";
    if (r.objective == Objective::Energy) {
        out << "objective = energy\n"
            << "mode = " << (r.mode == EnergyMode::Raw ? "raw" : "scaled") << "\n"
            << "energy_target = " << n(r.energy_target) << "\n";
        if (r.mode == EnergyMode::Scaled) out << "c_exp = " << n(r.c_exp) << "\n";
    } else {
        out << "objective = rotation\n"
            << "theta_dot_target = " << n(r.theta_dot_target) << " rad/s\n"
            << "c_exp = " << n(r.c_exp) << "\n";
    }
    out << "terminal_penalty = " << n(r.terminal_penalty) << "\n\n";

    out << "[study]\n"
        << "name = " << cfg.name << "\n"
        << "runs = " << cfg.n_runs << "\n"
        << "seed = " << cfg.base_seed << "\n"
        << "gamma = " << n(cfg.model.gamma) << "\n"
        << "p_explore = " << n(cfg.model.p_explore) << "\n"
        << "phase_split = " << (cfg.phase_split ? n(*cfg.phase_split) + " s" : "none") << "\n";
    return out.str();
}

}  // namespace acrobot
