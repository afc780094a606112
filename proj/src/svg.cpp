#include "cfc/svg.hpp"

#include "cfc/io.hpp"

#include <algorithm>
#include <cmath>

namespace cfc {

namespace {

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 170.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kGap = 40.0;
constexpr std::size_t kMaxPoints = 1500;

const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string esc(const std::string& s) {
    std::string o;
    for (char c : s) {
        switch (c) {
            case '<': o += "&lt;"; break;
            case '>': o += "&gt;"; break;
            case '&': o += "&amp;"; break;
            case '"': o += "&quot;"; break;
            default: o += c;
        }
    }
    return o;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

struct Panel {
    std::string label;
    std::vector<const std::vector<double>*> series;
};

void draw_panel(std::string& out, const Panel& p, const std::vector<double>& t, double y0) {
    const double w = kWidth - kLeft - kRight;
    const double h = kPanelHeight;
    double lo = 0.0, hi = 0.0;
    for (const auto* s : p.series) {
        for (double v : *s) {
            if (!std::isfinite(v)) continue;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi - lo < 1e-15) {
        hi += 1e-15;
        lo -= 1e-15;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double t0 = t.empty() ? 0.0 : t.front();
    const double t1 = t.empty() || t.back() <= t0 ? t0 + 1.0 : t.back();
    auto X = [&](double tt) { return kLeft + w * (tt - t0) / (t1 - t0); };
    auto Y = [&](double v) { return y0 + h * (hi - v) / (hi - lo); };

    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(y0) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
           "\" fill=\"none\" stroke=\"#444\"/>\n";
    if (lo < 0.0 && hi > 0.0) {
        out += "<line x1=\"" + num(kLeft) + "\" x2=\"" + num(kLeft + w) + "\" y1=\"" + num(Y(0.0)) + "\" y2=\"" +
               num(Y(0.0)) + "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    }
    out += "<text x=\"" + num(kLeft) + "\" y=\"" + num(y0 - 8.0) + "\" font-size=\"13\">" + esc(p.label) + "</text>\n";
    for (double v : {lo, 0.5 * (lo + hi), hi}) {
        out += "<text x=\"" + num(kLeft - 6.0) + "\" y=\"" + num(Y(v) + 4.0) +
               "\" font-size=\"10\" text-anchor=\"end\">" + esc(format_number(std::round(v * 1e6) / 1e6)) + "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double tt = t0 + (t1 - t0) * i / 4.0;
        out += "<text x=\"" + num(X(tt)) + "\" y=\"" + num(y0 + h + 14.0) + "\" font-size=\"10\" text-anchor=\"middle\">" +
               esc(format_number(std::round(tt * 1e4) / 1e4)) + "</text>\n";
    }

    const std::size_t n = t.size();
    const std::size_t stride = std::max<std::size_t>(1, n / kMaxPoints);
    for (std::size_t k = 0; k < p.series.size(); ++k) {
        const auto& s = *p.series[k];
        std::string pts;
        for (std::size_t i = 0; i < n; i += stride) {
            if (!std::isfinite(s[i])) continue;
            pts += num(X(t[i])) + "," + num(Y(s[i])) + " ";
        }
        if (n > 0 && (n - 1) % stride != 0 && std::isfinite(s[n - 1])) pts += num(X(t[n - 1])) + "," + num(Y(s[n - 1]));
        out += "<polyline fill=\"none\" stroke-width=\"1.4\" stroke=\"" +
               std::string(kColors[k % (sizeof kColors / sizeof *kColors)]) + "\" points=\"" + pts + "\"/>\n";
    }
}

}  // namespace

std::string render_svg(const TimeSeries& ts, const std::string& title) {
    std::vector<Panel> panels(4);
    panels[0].label = "frequency deviation d_omega [rad/s]";
    panels[1].label = "rocov d_eps [1/s]";
    panels[2].label = "voltage deviation d_v [pu]";
    panels[3].label = "active power deviation d_rho [pu]";
    for (const auto& c : ts.converters) {
        panels[0].series.push_back(&c.d_omega);
        panels[1].series.push_back(&c.d_eps);
        panels[2].series.push_back(&c.d_v);
        panels[3].series.push_back(&c.d_rho);
    }

    const double height = kTop + 4 * (kPanelHeight + kGap) + 10.0;
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(height) +
           "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2.0) + "\" y=\"20\" font-size=\"15\" text-anchor=\"middle\">" + esc(title) +
           "</text>\n";
    for (std::size_t i = 0; i < panels.size(); ++i) {
        draw_panel(out, panels[i], ts.t, kTop + 10.0 + static_cast<double>(i) * (kPanelHeight + kGap));
    }
    for (std::size_t k = 0; k < ts.converters.size(); ++k) {
        const double x = kLeft + 90.0 * static_cast<double>(k);
        out += "<text x=\"" + num(x) + "\" y=\"" + num(height - 6.0) + "\" font-size=\"11\" fill=\"" +
               kColors[k % (sizeof kColors / sizeof *kColors)] + "\">converter " + std::to_string(k + 1) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace cfc
