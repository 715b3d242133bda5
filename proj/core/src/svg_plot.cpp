#include "rhc/svg_plot.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

#include "rhc/errors.hpp"

namespace rhc {

namespace {

constexpr double kWidth = 900.0;
constexpr double kPanelHeight = 220.0;
constexpr double kMarginLeft = 90.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kPanelGap = 40.0;
constexpr std::size_t kMaxPoints = 2000;

std::string num(double v, int precision = 2) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, precision);
    return {buf, res.ptr};
}

std::string label_num(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 5);
    return {buf, res.ptr};
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
            const double pad = std::max(1.0, std::abs(hi)) * 0.05;
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

std::string render_svg(const std::string& title, const std::vector<Panel>& panels) {
    const double height = kMarginTop + static_cast<double>(panels.size()) * (kPanelHeight + kPanelGap);
    const double plot_w = kWidth - kMarginLeft - kMarginRight;

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth, 0) + "\" height=\"" + num(height, 0) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + num(kWidth / 2, 0) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" + escape(title) +
           "</text>\n";

    for (std::size_t k = 0; k < panels.size(); ++k) {
        const Panel& panel = panels[k];
        const double top = kMarginTop + static_cast<double>(k) * (kPanelHeight + kPanelGap);

        Range xr;
        Range yr;
        for (const auto& s : panel.series) {
            for (double v : s.x) xr.include(v);
            for (double v : s.y) yr.include(v);
        }
        xr.finish();
        yr.finish();
        const auto px = [&](double v) { return kMarginLeft + (v - xr.lo) / (xr.hi - xr.lo) * plot_w; };
        const auto py = [&](double v) { return top + kPanelHeight - (v - yr.lo) / (yr.hi - yr.lo) * kPanelHeight; };

        svg += "<rect x=\"" + num(kMarginLeft) + "\" y=\"" + num(top) + "\" width=\"" + num(plot_w) + "\" height=\"" +
               num(kPanelHeight) + "\" fill=\"none\" stroke=\"#444\"/>\n";
        svg += "<text x=\"" + num(kMarginLeft) + "\" y=\"" + num(top - 6) + "\">" + escape(panel.title) + "</text>\n";
        svg += "<text x=\"" + num(kMarginLeft - 6) + "\" y=\"" + num(top + 10) + "\" text-anchor=\"end\">" +
               label_num(yr.hi) + "</text>\n";
        svg += "<text x=\"" + num(kMarginLeft - 6) + "\" y=\"" + num(top + kPanelHeight) + "\" text-anchor=\"end\">" +
               label_num(yr.lo) + "</text>\n";
        svg += "<text x=\"" + num(kMarginLeft) + "\" y=\"" + num(top + kPanelHeight + 15) + "\">" + label_num(xr.lo) +
               "</text>\n";
        svg += "<text x=\"" + num(kMarginLeft + plot_w) + "\" y=\"" + num(top + kPanelHeight + 15) +
               "\" text-anchor=\"end\">t = " + label_num(xr.hi) + " days</text>\n";

        for (std::size_t s_idx = 0; s_idx < panel.series.size(); ++s_idx) {
            const Series& s = panel.series[s_idx];
            const std::size_t count = std::min(s.x.size(), s.y.size());
            const std::size_t stride = std::max<std::size_t>(1, count / kMaxPoints);
            std::string points;
            const auto flush = [&] {
                if (!points.empty()) {
                    svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.3\" points=\"" + points +
                           "\"/>\n";
                    points.clear();
                }
            };
            for (std::size_t i = 0; i < count; i += stride) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    flush();
                    continue;
                }
                points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
            }
            flush();
            const double ly = top + 16.0 + 16.0 * static_cast<double>(s_idx);
            const double lx = kMarginLeft + plot_w + 12.0;
            svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(lx + 18) + "\" y2=\"" +
                   num(ly - 4) + "\" stroke=\"" + s.color + "\" stroke-width=\"2\"/>\n";
            svg += "<text x=\"" + num(lx + 24) + "\" y=\"" + num(ly) + "\">" + escape(s.label) + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

namespace {

std::vector<double> column(const TrajectoryLog& log, const auto& pick) {
    std::vector<double> out;
    out.reserve(log.rows.size());
    for (const auto& r : log.rows) out.push_back(pick(r));
    return out;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path, "cannot open SVG output");
    out << body;
}

}  // namespace

std::vector<std::string> write_figures(const TrajectoryLog& log, const std::string& stem_in) {
    std::string stem = stem_in;
    if (stem.size() > 4 && stem.ends_with(".svg")) stem.resize(stem.size() - 4);

    const std::vector<double> t = column(log, [](const LogRow& r) { return r.t; });
    const char* drive = "#d62728";
    const char* response = "#1f77b4";

    std::vector<Panel> states;
    std::vector<Panel> controls;
    for (int i = 0; i < log.n; ++i) {
        const std::string idx = std::to_string(i + 1);
        states.push_back({"x" + idx + " / y" + idx,
                          {{"drive x" + idx, drive, t, column(log, [i](const LogRow& r) { return r.x(i); })},
                           {"response y" + idx, response, t, column(log, [i](const LogRow& r) { return r.y(i); })}}});
        controls.push_back({"u" + idx, {{"u" + idx, response, t, column(log, [i](const LogRow& r) { return r.u(i); })}}});
    }

    std::vector<Panel> estimates;
    for (int j = 0; j < log.p; ++j) {
        const std::string name = j < static_cast<int>(log.param_names.size()) ? log.param_names[j]
                                                                               : "theta" + std::to_string(j + 1);
        estimates.push_back(
            {name,
             {{"true " + name, drive, t, column(log, [j](const LogRow& r) { return r.theta_true(j); })},
              {"estimate " + name, response, t, column(log, [j](const LogRow& r) { return r.theta_hat(j); })}}});
    }

    const std::vector<std::pair<std::string, std::string>> files{
        {stem + "_states.svg", render_svg("Drive and response states", states)},
        {stem + "_controls.svg", render_svg("Receding-horizon control", controls)},
        {stem + "_estimates.svg", render_svg("Parameter estimates", estimates)},
    };
    std::vector<std::string> paths;
    for (const auto& [path, body] : files) {
        write_file(path, body);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace rhc
