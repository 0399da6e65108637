#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "acrobot/experiments.hpp"

namespace acrobot {

/// Parse or validation failure. `line()` is 0 for errors that are not tied
/// to a single line.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// A `section.key=value` override applied on top of the file contents.
struct ConfigOverride {
    std::string section;
    std::string key;
    std::string value;

    /// Throws ConfigError on a malformed override.
    static ConfigOverride parse(const std::string& text);
};

/// Parses the sectioned key=value study format:
///
///     [dynamics]
///     model = simplified
///     m1 = 2 kg
///     ...
///     [discretization]
///     dtheta = 10 deg
///
/// Sections [dynamics], [discretization], [actions], [episode], [reward]
/// and [study] are required. Angles take a `deg` or `rad` suffix (rad when
/// omitted), angular rates `rad/s` or `deg/s`, times `s` or `ms`.
StudyConfig parse_config(const std::string& text,
                         const std::vector<ConfigOverride>& overrides = {});

/// Writes a config that parses back to an equal StudyConfig. Dynamics are
/// written in explicit form.
std::string serialize_config(const StudyConfig& config);

}  // namespace acrobot
