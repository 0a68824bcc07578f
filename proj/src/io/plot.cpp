#include "oscseg/io/plot.hpp"

#include "oscseg/io/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace oscseg::io {

namespace {

constexpr double kLeft = 64.0;
constexpr double kRight = 16.0;
constexpr double kTitle = 22.0;
constexpr double kSignal = 150.0;
constexpr double kGap = 14.0;
constexpr double kStrip = 52.0;
constexpr double kMaxFrequency = 0.5;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Axis {
  double lo, hi, px0, px1;
  double operator()(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

void polyline(std::ostringstream& svg, const std::vector<double>& y, const Axis& x, const Axis& ya,
              const char* cls) {
  svg << "<polyline class=\"" << cls << "\" points=\"";
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (t) svg << ' ';
    svg << num(x(static_cast<double>(t + 1))) << ',' << num(ya(y[t]));
  }
  svg << "\"/>\n";
}

}  // namespace

std::string render_svg(const Json& report, const PlotOptions& opts) {
  if (!report.is_object() || report.value("kind", "") != "detection") {
    throw InputError("report", 0, 0, "not a detection report");
  }
  const long T = report.at("partition").at("T").get<long>();
  const auto cps = report.at("partition").at("cps").get<std::vector<long>>();
  const auto labels = report.at("input").at("labels").get<std::vector<std::string>>();
  const auto& observed = report.at("series").at("observed");
  const auto& fitted = report.at("series").at("fitted");
  const auto& segments = report.at("segments");
  const std::size_t d = labels.size();

  double max_amp = 0.0;
  for (const auto& seg : segments) {
    for (const auto& row : seg.at("series")) {
      for (const auto& s : row.at("selected")) max_amp = std::max(max_amp, s.at("amplitude").get<double>());
    }
  }

  const double W = opts.width;
  const double H = static_cast<double>(opts.panel_height) * static_cast<double>(d);
  const Axis x{1.0, static_cast<double>(std::max<long>(T, 2)), kLeft, W - kRight};

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << num(H)
      << "\" viewBox=\"0 0 " << opts.width << ' ' << num(H) << "\">\n";
  svg << "<style>"
         ".obs{fill:none;stroke:#9a9a9a;stroke-width:0.8}"
         ".fit{fill:none;stroke:#1f5fa8;stroke-width:1.2}"
         ".cp{stroke:#c0392b;stroke-width:1;stroke-dasharray:4 3}"
         ".frame{fill:none;stroke:#333;stroke-width:0.8}"
         ".bar{fill:#1f5fa8}"
         "text{font-family:sans-serif;font-size:11px;fill:#222}"
         "</style>\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (std::size_t i = 0; i < d; ++i) {
    const double top = static_cast<double>(opts.panel_height) * static_cast<double>(i);
    const double sig_top = top + kTitle;
    const double sig_bottom = sig_top + kSignal;
    const double strip_top = sig_bottom + kGap;
    const double strip_bottom = strip_top + kStrip;
    const auto obs = observed.at(i).get<std::vector<double>>();
    const auto fit = fitted.at(i).get<std::vector<double>>();

    double lo = 0.0, hi = 0.0;
    if (!obs.empty()) {
      lo = std::min(*std::min_element(obs.begin(), obs.end()), *std::min_element(fit.begin(), fit.end()));
      hi = std::max(*std::max_element(obs.begin(), obs.end()), *std::max_element(fit.begin(), fit.end()));
    }
    if (hi - lo < 1e-12) {
      lo -= 1.0;
      hi += 1.0;
    }
    const Axis ya{lo, hi, sig_bottom, sig_top};
    const Axis fa{0.0, kMaxFrequency, strip_bottom, strip_top};

    svg << "<g class=\"panel\" id=\"panel-" << i + 1 << "\">\n";
    svg << "<text x=\"" << num(kLeft) << "\" y=\"" << num(top + 15) << "\">" << escape(labels[i]) << "</text>\n";
    svg << "<rect class=\"frame\" x=\"" << num(kLeft) << "\" y=\"" << num(sig_top) << "\" width=\""
        << num(W - kRight - kLeft) << "\" height=\"" << num(kSignal) << "\"/>\n";
    svg << "<rect class=\"frame\" x=\"" << num(kLeft) << "\" y=\"" << num(strip_top) << "\" width=\""
        << num(W - kRight - kLeft) << "\" height=\"" << num(kStrip) << "\"/>\n";
    svg << "<text x=\"4\" y=\"" << num(sig_top + 10) << "\">" << num(hi) << "</text>\n";
    svg << "<text x=\"4\" y=\"" << num(sig_bottom) << "\">" << num(lo) << "</text>\n";
    svg << "<text x=\"4\" y=\"" << num(strip_top + 10) << "\">f 0.50</text>\n";
    svg << "<text x=\"4\" y=\"" << num(strip_bottom) << "\">f 0.00</text>\n";

    polyline(svg, obs, x, ya, "obs");
    polyline(svg, fit, x, ya, "fit");

    for (const auto& seg : segments) {
      const double u = static_cast<double>(seg.at("u").get<long>()) + 1.0;
      const double v = static_cast<double>(seg.at("v").get<long>());
      for (const auto& s : seg.at("series").at(i).at("selected")) {
        const double f = std::min(s.at("frequency").get<double>(), kMaxFrequency);
        const double a = max_amp > 0.0 ? s.at("amplitude").get<double>() / max_amp : 0.0;
        svg << "<rect class=\"bar\" x=\"" << num(x(u)) << "\" y=\"" << num(fa(f) - 1.5) << "\" width=\""
            << num(std::max(x(v) - x(u), 1.0)) << "\" height=\"3.00\" fill-opacity=\""
            << num(0.15 + 0.85 * a) << "\"/>\n";
      }
    }
    for (long c : cps) {
      const double px = x(static_cast<double>(c) + 0.5);
      svg << "<line class=\"cp\" x1=\"" << num(px) << "\" y1=\"" << num(sig_top) << "\" x2=\"" << num(px)
          << "\" y2=\"" << num(strip_bottom) << "\"/>\n";
    }
    svg << "<text x=\"" << num(kLeft) << "\" y=\"" << num(strip_bottom + 12) << "\">1</text>\n";
    svg << "<text x=\"" << num(W - kRight - 30) << "\" y=\"" << num(strip_bottom + 12) << "\">" << T
        << "</text>\n";
    svg << "</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace oscseg::io
