#pragma once

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "acrobot/experiments.hpp"

namespace acrobot {

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);
/// Strict full-token parse; throws std::invalid_argument.
double parse_number(std::string_view text);

/// Numeric table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column position by name; throws CsvError if absent.
    std::size_t column(const std::string& name) const;
    bool has_column(const std::string& name) const;
    std::vector<double> column_values(const std::string& name) const;

    bool operator==(const CsvTable&) const = default;
};

void write_csv(std::ostream& out, const CsvTable& table);
void write_csv_file(const std::string& path, const CsvTable& table);
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// `run,episode,mean_reward`
CsvTable learning_curve_table(const StudyResult& result);
/// `episode,mean,std,lc30`
CsvTable aggregate_table(const StudyResult& result);
/// `run,episode,mean_energy`
CsvTable energy_table(const StudyResult& result);
/// `run,episode,swingup_reward,hold_reward`
CsvTable phase_split_table(const StudyResult& result);
/// `angle_bin,vel_bin,value` for every grid cell.
CsvTable value_function_table(std::span<const double> values, const Discretization& disc);
/// `t,theta,theta_dot,u,action,reward,H,Htilde`
CsvTable trajectory_table(const EpisodeRecord& record, const AcrobotParams& params,
                          double c_exp);

}  // namespace acrobot
