#include "acrobot/csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace acrobot {

std::string format_number(double value) {
    std::array<char, 64> buffer{};
    const auto [end, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    if (ec != std::errc{}) throw std::invalid_argument("number cannot be formatted");
    return std::string(buffer.data(), end);
}

double parse_number(std::string_view text) {
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
        throw std::invalid_argument("'" + std::string(text) + "' is not a number");
    }
    return value;
}

std::size_t CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw CsvError("missing column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
}

bool CsvTable::has_column(const std::string& name) const {
    return std::find(header.begin(), header.end(), name) != header.end();
}

std::vector<double> CsvTable::column_values(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row[c]);
    return out;
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        out << (i ? "," : "") << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out << (i ? "," : "") << format_number(row[i]);
        }
        out << '\n';
    }
}

void write_csv_file(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CsvError("cannot open '" + path + "' for writing");
    write_csv(out, table);
    if (!out) throw CsvError("failed writing '" + path + "'");
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream stream(line);
    while (std::getline(stream, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw CsvError("empty CSV: no header");
    strip_cr(line);
    table.header = split_fields(line);
    if (table.header.empty()) throw CsvError("empty CSV header");

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != table.header.size()) {
            throw CsvError("line " + std::to_string(line_no) + ": expected " +
                           std::to_string(table.header.size()) + " fields");
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            try {
                row.push_back(parse_number(f));
            } catch (const std::invalid_argument& e) {
                throw CsvError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CsvError("cannot open '" + path + "'");
    return read_csv(in);
}

CsvTable learning_curve_table(const StudyResult& result) {
    CsvTable table{{"run", "episode", "mean_reward"}, {}};
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        const auto& curve = result.runs[r].curve;
        for (std::size_t e = 0; e < curve.size(); ++e) {
            table.rows.push_back({double(r), double(e + 1), curve[e]});
        }
    }
    return table;
}

CsvTable aggregate_table(const StudyResult& result) {
    CsvTable table{{"episode", "mean", "std", "lc30"}, {}};
    for (std::size_t e = 0; e < result.mean.size(); ++e) {
        table.rows.push_back({double(e + 1), result.mean[e], result.std[e], result.lc30[e]});
    }
    return table;
}

CsvTable energy_table(const StudyResult& result) {
    CsvTable table{{"run", "episode", "mean_energy"}, {}};
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        const auto& energy = result.runs[r].energy;
        for (std::size_t e = 0; e < energy.size(); ++e) {
            table.rows.push_back({double(r), double(e + 1), energy[e]});
        }
    }
    return table;
}

CsvTable phase_split_table(const StudyResult& result) {
    CsvTable table{{"run", "episode", "swingup_reward", "hold_reward"}, {}};
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
        const auto& phases = result.runs[r].phases;
        for (std::size_t e = 0; e < phases.size(); ++e) {
            table.rows.push_back({double(r), double(e + 1), phases[e].swing_up, phases[e].hold});
        }
    }
    return table;
}

CsvTable value_function_table(std::span<const double> values, const Discretization& disc) {
    if (values.size() != disc.state_count()) {
        throw CsvError("value function does not match the discretization");
    }
    CsvTable table{{"angle_bin", "vel_bin", "value"}, {}};
    for (int a = 0; a < disc.n_angle(); ++a) {
        for (int v = 0; v < disc.n_vel(); ++v) {
            table.rows.push_back({double(a), double(v), values[StateIndex::grid(a, v).flat(disc)]});
        }
    }
    return table;
}

CsvTable trajectory_table(const EpisodeRecord& record, const AcrobotParams& params,
                          double c_exp) {
    CsvTable table{{"t", "theta", "theta_dot", "u", "action", "reward", "H", "Htilde"}, {}};
    table.rows.reserve(record.steps.size());
    for (const StepLog& s : record.steps) {
        table.rows.push_back({s.t, s.theta, s.theta_dot, s.u, double(s.action), s.reward,
                              hamiltonian(s.theta, s.theta_dot, params),
                              scaled_hamiltonian(s.theta, s.theta_dot, c_exp)});
    }
    return table;
}

}  // namespace acrobot
