#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ctsim/errors.hpp"
#include "ctsim/sim_harness.hpp"

namespace cts {

namespace {

constexpr const char* kCsvHeader =
    "time,x,y,heading,speed,target_speed,lateral_error,heading_error,"
    "curvature_cmd,applied_curvature,stop_state,emergency";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    return out;
}

}  // namespace

void write_trace_csv(std::span<const TraceRecord> trace, std::ostream& out) {
    out << kCsvHeader << '\n';
    for (const TraceRecord& r : trace) {
        out << fmt(r.time) << ',' << fmt(r.x) << ',' << fmt(r.y) << ',' << fmt(r.heading) << ','
            << fmt(r.speed) << ',' << fmt(r.target_speed) << ',' << fmt(r.lateral_error) << ','
            << fmt(r.heading_error) << ',' << fmt(r.curvature_cmd) << ','
            << fmt(r.applied_curvature) << ',' << r.stop_state << ','
            << (r.emergency ? '1' : '0') << '\n';
    }
    if (!out) {
        throw IoError("trace write failed");
    }
}

void write_trace_csv(std::span<const TraceRecord> trace, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_trace_csv(trace, out);
}

std::string trace_csv_string(std::span<const TraceRecord> trace) {
    std::ostringstream out;
    write_trace_csv(trace, out);
    return out.str();
}

namespace {

struct Series {
    const char* label;
    std::vector<double> values;
};

void polyline(std::ostream& out, const std::vector<double>& xs, const std::vector<double>& ys,
              double x0, double y0, double w, double h, const char* color) {
    double xmin = *std::min_element(xs.begin(), xs.end());
    double xmax = *std::max_element(xs.begin(), xs.end());
    double ymin = *std::min_element(ys.begin(), ys.end());
    double ymax = *std::max_element(ys.begin(), ys.end());
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;

    out << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double px = x0 + (xs[i] - xmin) / (xmax - xmin) * w;
        const double py = y0 + h - (ys[i] - ymin) / (ymax - ymin) * h;
        out << fmt(px) << ',' << fmt(py) << ' ';
    }
    out << "\"/>\n";
}

}  // namespace

void write_trace_svg(std::span<const TraceRecord> trace, std::ostream& out) {
    constexpr double kWidth = 800.0;
    constexpr double kPathH = 320.0;
    constexpr double kPanelH = 110.0;
    constexpr double kMargin = 40.0;
    const double total_h = kMargin + kPathH + 4 * (kPanelH + kMargin) + kMargin;

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << fmt(total_h) << "\" viewBox=\"0 0 " << kWidth << ' ' << fmt(total_h) << "\">\n";

    std::vector<double> time, xs, ys;
    Series panels[4] = {{"speed [m/s]", {}},
                        {"lateral error [m]", {}},
                        {"heading error [rad]", {}},
                        {"curvature cmd [1/m]", {}}};
    for (const TraceRecord& r : trace) {
        time.push_back(r.time);
        xs.push_back(r.x);
        ys.push_back(r.y);
        panels[0].values.push_back(r.speed);
        panels[1].values.push_back(r.lateral_error);
        panels[2].values.push_back(r.heading_error);
        panels[3].values.push_back(r.curvature_cmd);
    }

    double y_cursor = kMargin;
    out << "  <text x=\"" << kMargin << "\" y=\"" << fmt(y_cursor - 10.0)
        << "\" font-size=\"12\">path x-y [m]</text>\n";
    out << "  <rect x=\"" << kMargin << "\" y=\"" << fmt(y_cursor) << "\" width=\""
        << fmt(kWidth - 2 * kMargin) << "\" height=\"" << kPathH
        << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
    if (!trace.empty()) {
        polyline(out, xs, ys, kMargin, y_cursor, kWidth - 2 * kMargin, kPathH, "#1f77b4");
    }
    y_cursor += kPathH + kMargin;

    for (const Series& panel : panels) {
        out << "  <text x=\"" << kMargin << "\" y=\"" << fmt(y_cursor - 10.0)
            << "\" font-size=\"12\">" << panel.label << "</text>\n";
        out << "  <rect x=\"" << kMargin << "\" y=\"" << fmt(y_cursor) << "\" width=\""
            << fmt(kWidth - 2 * kMargin) << "\" height=\"" << kPanelH
            << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
        if (!trace.empty()) {
            polyline(out, time, panel.values, kMargin, y_cursor, kWidth - 2 * kMargin, kPanelH,
                     "#d62728");
        }
        y_cursor += kPanelH + kMargin;
    }

    out << "</svg>\n";
    if (!out) {
        throw IoError("svg write failed");
    }
}

void write_trace_svg(std::span<const TraceRecord> trace, const std::filesystem::path& path) {
    auto out = open_out(path);
    write_trace_svg(trace, out);
}

std::string metrics_json(const MetricsReport& metrics) {
    nlohmann::ordered_json j;
    j["lateral_error_mean_curves"] = metrics.lateral_error_mean_curves;
    j["lateral_error_max"] = metrics.lateral_error_max;
    j["heading_error_min"] = metrics.heading_error_min;
    j["heading_error_max"] = metrics.heading_error_max;
    j["curvature_max"] = metrics.curvature_max;
    j["route_completed"] = metrics.route_completed;
    j["u_turn_extent"] = metrics.u_turn_extent;
    j["stops"] = nlohmann::ordered_json::array();
    for (const StopMetrics& s : metrics.stops) {
        j["stops"].push_back({{"id", s.id},
                              {"arrival_time", s.arrival_time},
                              {"hold_duration", s.hold_duration},
                              {"position_error", s.position_error}});
    }
    return j.dump(2) + "\n";
}

}  // namespace cts
