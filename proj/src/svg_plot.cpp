/**
 * @file svg_plot.cpp
 * @brief Minimal SVG line charts for percentile bands.
 */

#include <drs/svg_plot.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace drs {

namespace {

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
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

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tickLabel(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Roughly five "nice" ticks (1, 2, 5 x 10^k) covering [lo, hi].
std::vector<double> niceTicks(double lo, double hi)
{
    const double span = hi - lo;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * span; t += step)
        ticks.push_back(std::abs(t) < 1e-12 * span ? 0.0 : t);
    return ticks;
}

}  // namespace

std::string render_band_plot(const PlotSpec& spec, const std::vector<double>& x, const std::vector<BandSeries>& series)
{
    const double left = 70, right = 20, top = 40, bottom = 50;
    const double pw = spec.width - left - right;
    const double ph = spec.height - top - bottom;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (double v : x)
        if (std::isfinite(v)) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
    for (const auto& s : series)
        for (const auto* vec : {&s.lower, &s.median, &s.upper})
            for (double v : *vec)
                if (std::isfinite(v)) {
                    ymin = std::min(ymin, v);
                    ymax = std::max(ymax, v);
                }
    if (!std::isfinite(xmin)) {
        xmin = 0.0;
        xmax = 1.0;
    }
    if (!std::isfinite(ymin)) {
        ymin = 0.0;
        ymax = 1.0;
    }
    ymin = std::min(ymin, 0.0);
    if (xmax <= xmin)
        xmax = xmin + 1.0;
    if (ymax <= ymin)
        ymax = ymin + 1.0;
    ymax += 0.05 * (ymax - ymin);

    auto sx = [&](double v) { return left + (v - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double v) { return top + (1.0 - (v - ymin) / (ymax - ymin)) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << fmt(spec.width / 2.0) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << escape(spec.title) << "</text>\n";

    for (double t : niceTicks(xmin, xmax)) {
        os << "<line x1=\"" << fmt(sx(t)) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(sx(t)) << "\" y2=\""
           << fmt(top + ph) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << fmt(top + ph + 16) << "\" text-anchor=\"middle\">"
           << tickLabel(t) << "</text>\n";
    }
    for (double t : niceTicks(ymin, ymax)) {
        os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(sy(t)) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
           << fmt(sy(t)) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(sy(t) + 4) << "\" text-anchor=\"end\">"
           << tickLabel(t) << "</text>\n";
    }
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(spec.height - 10.0) << "\" text-anchor=\"middle\">"
       << escape(spec.x_label) << "</text>\n";
    os << "<text transform=\"translate(16," << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(spec.y_label) << "</text>\n";

    for (const auto& s : series) {
        const std::size_t n = std::min({x.size(), s.lower.size(), s.median.size(), s.upper.size()});
        std::ostringstream band, mid;
        for (std::size_t i = 0; i < n; ++i)
            if (std::isfinite(x[i]) && std::isfinite(s.upper[i]))
                band << fmt(sx(x[i])) << ',' << fmt(sy(s.upper[i])) << ' ';
        for (std::size_t i = n; i-- > 0;)
            if (std::isfinite(x[i]) && std::isfinite(s.lower[i]))
                band << fmt(sx(x[i])) << ',' << fmt(sy(s.lower[i])) << ' ';
        for (std::size_t i = 0; i < n; ++i)
            if (std::isfinite(x[i]) && std::isfinite(s.median[i]))
                mid << fmt(sx(x[i])) << ',' << fmt(sy(s.median[i])) << ' ';
        os << "<polygon points=\"" << band.str() << "\" fill=\"" << escape(s.color)
           << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        os << "<polyline points=\"" << mid.str() << "\" fill=\"none\" stroke=\"" << escape(s.color)
           << "\" stroke-width=\"1.5\"/>\n";
    }

    double ly = top + 14;
    for (const auto& s : series) {
        os << "<line x1=\"" << fmt(left + pw - 150) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(left + pw - 130)
           << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << escape(s.color) << "\" stroke-width=\"3\"/>\n";
        os << "<text x=\"" << fmt(left + pw - 124) << "\" y=\"" << fmt(ly) << "\">" << escape(s.label) << "</text>\n";
        ly += 16;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace drs
