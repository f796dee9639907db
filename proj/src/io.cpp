#include "bayesmerton/io.hpp"

#include "bayesmerton/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace bayesmerton {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) { return format_significant(v, 6); }

}  // namespace

SvgTransform write_sweep_svg(std::ostream& out, const SweepResult& sweep, const std::string& title) {
    double t_lo = 0.0, t_hi = 1.0;
    if (!sweep.horizons.empty()) {
        t_lo = sweep.horizons.front();
        t_hi = sweep.horizons.back();
    }
    if (!(t_hi > t_lo)) t_hi = t_lo + 1.0;

    double u_lo = sweep.limit, u_hi = sweep.limit;
    for (std::size_t i = 0; i < sweep.u_values.size(); ++i) {
        if (!sweep.ok[i]) continue;
        u_lo = std::min(u_lo, sweep.u_values[i]);
        u_hi = std::max(u_hi, sweep.u_values[i]);
    }
    const double pad = (u_hi > u_lo) ? 0.05 * (u_hi - u_lo) : std::max(0.05 * std::abs(u_hi), 0.05);
    u_lo -= pad;
    u_hi += pad;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    SvgTransform tf;
    tf.ax = plot_w / (t_hi - t_lo);
    tf.bx = kLeft - tf.ax * t_lo;
    tf.ay = -plot_h / (u_hi - u_lo);
    tf.by = kTop - tf.ay * u_hi;

    auto px = [&](double T) { return tf.ax * T + tf.bx; };
    auto py = [&](double u) { return tf.ay * u + tf.by; };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<!-- affine map from data to pixels: px = " << format_shortest(tf.ax) << " * T + "
        << format_shortest(tf.bx) << ", py = " << format_shortest(tf.ay) << " * u_star + " << format_shortest(tf.by)
        << " -->\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "  <text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"14\">" << xml_escape(title) << "</text>\n";

    // axes
    out << "  <g stroke=\"black\" stroke-width=\"1\">\n";
    out << "    <line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
        << kTop + plot_h << "\"/>\n";
    out << "    <line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
        << "\"/>\n";
    out << "  </g>\n";

    out << "  <g font-family=\"sans-serif\" font-size=\"10\">\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double T = t_lo + (t_hi - t_lo) * i / kTicks;
        const double u = u_lo + (u_hi - u_lo) * i / kTicks;
        out << "    <text x=\"" << fmt(px(T)) << "\" y=\"" << kTop + plot_h + 15
            << "\" text-anchor=\"middle\">" << fmt(T) << "</text>\n";
        out << "    <text x=\"" << kLeft - 6 << "\" y=\"" << fmt(py(u) + 3) << "\" text-anchor=\"end\">" << fmt(u)
            << "</text>\n";
    }
    out << "    <text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\">horizon T</text>\n";
    out << "    <text x=\"16\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << kTop + plot_h / 2 << ")\">u*(t, T, y)</text>\n";
    out << "  </g>\n";

    out << "  <line class=\"limit\" x1=\"" << format_shortest(px(t_lo)) << "\" y1=\"" << format_shortest(py(sweep.limit))
        << "\" x2=\"" << format_shortest(px(t_hi)) << "\" y2=\"" << format_shortest(py(sweep.limit))
        << "\" stroke=\"firebrick\" stroke-dasharray=\"6 4\"/>\n";

    out << "  <polyline class=\"u_star\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < sweep.horizons.size(); ++i) {
        if (!sweep.ok[i]) continue;
        if (!first) out << ' ';
        first = false;
        out << format_shortest(px(sweep.horizons[i])) << ',' << format_shortest(py(sweep.u_values[i]));
    }
    out << "\"/>\n";
    out << "</svg>\n";
    return tf;
}

}  // namespace bayesmerton
