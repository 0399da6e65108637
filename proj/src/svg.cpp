#include "acrobot/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include "acrobot/experiments.hpp"

namespace acrobot {

PlotKind parse_plot_kind(const std::string& text) {
    if (text == "learning-curve") return PlotKind::LearningCurve;
    if (text == "phase") return PlotKind::Phase;
    if (text == "energy") return PlotKind::Energy;
    if (text == "value-function") return PlotKind::ValueFunction;
    throw PlotError("unknown plot kind '" + text + "'");
}

std::string to_string(PlotKind kind) {
    switch (kind) {
        case PlotKind::LearningCurve: return "learning-curve";
        case PlotKind::Phase: return "phase";
        case PlotKind::Energy: return "energy";
        case PlotKind::ValueFunction: return "value-function";
    }
    return "unknown";
}

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fmt(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", v);
    return buffer;
}

std::string label(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.4g", v);
    return buffer;
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;

    static Range of(const std::vector<double>& values) {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        Range r{*mn, *mx};
        if (r.hi - r.lo < 1e-12) {
            const double pad = std::max(1.0, std::abs(r.lo) * 0.1);
            r.lo -= pad;
            r.hi += pad;
        }
        return r;
    }

    void include(const Range& other) {
        lo = std::min(lo, other.lo);
        hi = std::max(hi, other.hi);
    }
};

class Canvas {
public:
    Canvas(Range x, Range y, const std::string& title, const std::string& x_label,
           const std::string& y_label)
        : x_(x), y_(y) {
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
             << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
             << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
             << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
             << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
             << "font-family=\"sans-serif\" font-size=\"16\">" << escape(title) << "</text>\n";
        axes(x_label, y_label);
    }

    double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * plot_w(); }
    double py(double y) const { return kTop + (y_.hi - y) / (y_.hi - y_.lo) * plot_h(); }

    void polyline(const std::vector<std::pair<double, double>>& points, const std::string& cls,
                  const std::string& color, double stroke = 1.2) {
        if (points.empty()) return;
        out_ << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
             << "\" stroke-width=\"" << stroke << "\" points=\"";
        for (std::size_t i = 0; i < points.size(); ++i) {
            out_ << (i ? " " : "") << fmt(px(points[i].first)) << ',' << fmt(py(points[i].second));
        }
        out_ << "\"/>\n";
    }

    void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
        double y = kTop + 14;
        for (const auto& [name, color] : entries) {
            const double x = kWidth - kRight - 150;
            out_ << "<line x1=\"" << x << "\" y1=\"" << y - 4 << "\" x2=\"" << x + 24 << "\" y2=\""
                 << y - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
                 << "<text x=\"" << x + 30 << "\" y=\"" << y
                 << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(name)
                 << "</text>\n";
            y += 18;
        }
    }

    std::ostringstream& raw() { return out_; }

    std::string finish() {
        out_ << "</svg>\n";
        return out_.str();
    }

    static double plot_w() { return kWidth - kLeft - kRight; }
    static double plot_h() { return kHeight - kTop - kBottom; }

private:
    void axes(const std::string& x_label, const std::string& y_label) {
        out_ << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
             << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h() << "\" x2=\""
             << kLeft + plot_w() << "\" y2=\"" << kTop + plot_h() << "\"/>\n"
             << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
             << kTop + plot_h() << "\"/>\n</g>\n";
        constexpr int kTicks = 5;
        for (int i = 0; i <= kTicks; ++i) {
            const double xv = x_.lo + (x_.hi - x_.lo) * i / kTicks;
            const double yv = y_.lo + (y_.hi - y_.lo) * i / kTicks;
            out_ << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(kTop + plot_h() + 18)
                 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                 << label(xv) << "</text>\n"
                 << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(yv) + 4)
                 << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                 << label(yv) << "</text>\n";
        }
        out_ << "<text x=\"" << fmt(kLeft + plot_w() / 2) << "\" y=\"" << fmt(kHeight - 16)
             << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
             << escape(x_label) << "</text>\n"
             << "<text x=\"18\" y=\"" << fmt(kTop + plot_h() / 2)
             << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
             << "transform=\"rotate(-90 18 " << fmt(kTop + plot_h() / 2) << ")\">"
             << escape(y_label) << "</text>\n";
    }

    Range x_;
    Range y_;
    std::ostringstream out_;
};

void require(const CsvTable& table, const std::vector<std::string>& columns, PlotKind kind) {
    for (const auto& c : columns) {
        if (!table.has_column(c)) {
            throw PlotError(to_string(kind) + " plot needs column '" + c + "'");
        }
    }
    if (table.rows.empty()) throw PlotError("CSV has no data rows");
}

std::vector<std::pair<double, double>> zip(const std::vector<double>& x,
                                           const std::vector<double>& y) {
    std::vector<std::pair<double, double>> out;
    out.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out.emplace_back(x[i], y[i]);
    return out;
}

std::string learning_curve(const CsvTable& table, const std::string& title) {
    std::vector<double> episodes;
    std::vector<double> raw;
    std::vector<double> smooth;
    if (table.has_column("mean") && table.has_column("lc30")) {
        require(table, {"episode", "mean", "lc30"}, PlotKind::LearningCurve);
        episodes = table.column_values("episode");
        raw = table.column_values("mean");
        smooth = table.column_values("lc30");
    } else {
        require(table, {"run", "episode", "mean_reward"}, PlotKind::LearningCurve);
        const std::size_t run = table.column("run");
        const double first_run = table.rows.front()[run];
        for (const auto& row : table.rows) {
            if (row[run] != first_run) continue;
            episodes.push_back(row[table.column("episode")]);
            raw.push_back(row[table.column("mean_reward")]);
        }
        smooth = moving_average(raw, 30);
    }
    Range y = Range::of(raw);
    y.include(Range::of(smooth));
    Canvas canvas(Range::of(episodes), y, title.empty() ? "Learning curve" : title, "episode",
                  "mean reward");
    canvas.polyline(zip(episodes, raw), "series raw", "#9ab8d8");
    canvas.polyline(zip(episodes, smooth), "series lc30", "#c0392b", 2.0);
    canvas.legend({{"per episode", "#9ab8d8"}, {"LC30", "#c0392b"}});
    return canvas.finish();
}

std::string energy(const CsvTable& table, const std::string& title) {
    require(table, {"run", "episode", "mean_energy"}, PlotKind::Energy);
    std::map<double, std::pair<double, int>> per_episode;
    const std::size_t ec = table.column("episode");
    const std::size_t vc = table.column("mean_energy");
    for (const auto& row : table.rows) {
        auto& [sum, count] = per_episode[row[ec]];
        sum += row[vc];
        ++count;
    }
    std::vector<double> episodes;
    std::vector<double> means;
    for (const auto& [e, acc] : per_episode) {
        episodes.push_back(e);
        means.push_back(acc.first / acc.second);
    }
    Canvas canvas(Range::of(episodes), Range::of(means), title.empty() ? "Energy" : title,
                  "episode", "mean energy");
    canvas.polyline(zip(episodes, means), "series energy", "#2c7fb8", 1.8);
    return canvas.finish();
}

std::string phase(const CsvTable& table, const std::string& title) {
    require(table, {"theta", "theta_dot"}, PlotKind::Phase);
    const auto theta = table.column_values("theta");
    const auto theta_dot = table.column_values("theta_dot");
    Range x{0.0, 2.0 * std::numbers::pi};
    x.include(Range::of(theta));
    Canvas canvas(x, Range::of(theta_dot), title.empty() ? "Phase portrait" : title,
                  "theta [rad]", "theta_dot [rad/s]");
    std::vector<std::pair<double, double>> segment;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!segment.empty() && std::abs(theta[i] - segment.back().first) > std::numbers::pi) {
            canvas.polyline(segment, "series phase", "#2c7fb8");
            segment.clear();
        }
        segment.emplace_back(theta[i], theta_dot[i]);
    }
    canvas.polyline(segment, "series phase", "#2c7fb8");
    return canvas.finish();
}

std::string heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(255 * t));
    const int g = static_cast<int>(std::lround(255 * (1.0 - std::abs(2.0 * t - 1.0)) * 0.8));
    const int b = static_cast<int>(std::lround(255 * (1.0 - t)));
    char buffer[8];
    std::snprintf(buffer, sizeof buffer, "#%02x%02x%02x", r, g, b);
    return buffer;
}

std::string value_function(const CsvTable& table, const std::string& title) {
    require(table, {"angle_bin", "vel_bin", "value"}, PlotKind::ValueFunction);
    const auto angle = table.column_values("angle_bin");
    const auto vel = table.column_values("vel_bin");
    const auto value = table.column_values("value");
    const double n_angle = *std::max_element(angle.begin(), angle.end()) + 1;
    const double n_vel = *std::max_element(vel.begin(), vel.end()) + 1;
    const Range v = Range::of(value);

    Canvas canvas(Range{0.0, n_angle}, Range{0.0, n_vel},
                  title.empty() ? "Value function" : title, "angle bin", "velocity bin");
    const double w = Canvas::plot_w() / n_angle;
    const double h = Canvas::plot_h() / n_vel;
    auto& out = canvas.raw();
    out << "<g class=\"cells\">\n";
    for (std::size_t i = 0; i < value.size(); ++i) {
        out << "<rect class=\"cell\" x=\"" << fmt(canvas.px(angle[i])) << "\" y=\""
            << fmt(canvas.py(vel[i] + 1)) << "\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
            << "\" fill=\"" << heat_color((value[i] - v.lo) / (v.hi - v.lo)) << "\"/>\n";
    }
    out << "</g>\n";
    out << "<text x=\"" << kWidth - kRight << "\" y=\"" << kTop - 8
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">value "
        << label(v.lo) << " (blue) to " << label(v.hi) << " (red)</text>\n";
    return canvas.finish();
}

}  // namespace

std::string render_svg(const CsvTable& table, PlotKind kind, const std::string& title) {
    switch (kind) {
        case PlotKind::LearningCurve: return learning_curve(table, title);
        case PlotKind::Phase: return phase(table, title);
        case PlotKind::Energy: return energy(table, title);
        case PlotKind::ValueFunction: return value_function(table, title);
    }
    throw PlotError("unknown plot kind");
}

}  // namespace acrobot
