#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "dialectoscope/dialectogram.hpp"

namespace dialectoscope {

namespace {

constexpr double kWidth = 1600.0;
constexpr double kHeight = 1200.0;
constexpr double kLeft = 130.0;
constexpr double kRight = 1540.0;
constexpr double kTop = 90.0;
constexpr double kBottom = 1080.0;
constexpr double kMaxRadius = 14.0;
constexpr double kMinRadius = 1.5;
constexpr double kFontSize = 13.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // Avoid "-0.00" so identical plots never differ by the sign of zero.
  if (std::string(buf) == "-0.00") return "0.00";
  return buf;
}

std::string escape(const std::string& s) {
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

const char* color(EcClass c) {
  switch (c) {
    case EcClass::Both: return "#7b3294";
    case EcClass::Only1: return "#d7191c";
    case EcClass::Only2: return "#2c7bb6";
    case EcClass::Neither: return "#9a9a9a";
  }
  return "#9a9a9a";
}

struct Box {
  double x0, y0, x1, y1;
  bool overlaps(const Box& o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
  bool inside() const { return x0 >= kLeft && x1 <= kRight && y0 >= kTop && y1 <= kBottom; }
};

double nice_step(double range) {
  const double raw = range / 8.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

}  // namespace

std::string dialectogram_to_svg(const Dialectogram& d, const SvgOptions& options) {
  double limit = 0.0;
  double max_freq = 0.0;
  for (const auto& r : d.records) {
    limit = std::max({limit, std::abs(r.alpha1), std::abs(r.alpha2)});
    max_freq = std::max(max_freq, 0.5 * (static_cast<double>(r.freq1) + static_cast<double>(r.freq2)));
  }
  limit = limit > 0.0 ? limit * 1.05 : 1.0;
  const auto sx = [&](double a) { return kLeft + (a + limit) / (2.0 * limit) * (kRight - kLeft); };
  const auto sy = [&](double a) { return kBottom - (a + limit) / (2.0 * limit) * (kBottom - kTop); };

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"1600\" height=\"1200\" "
       "viewBox=\"0 0 1600 1200\">\n";
  s += "<style>text{font-family:sans-serif;fill:#222}.tick{font-size:12px}.label{font-size:13px}"
       ".axis{stroke:#444;stroke-width:1}.grid{stroke:#e4e4e4;stroke-width:1}"
       ".diag{stroke:#666;stroke-width:1.2;stroke-dasharray:8 6}"
       "circle{fill-opacity:0.55;stroke-width:0.6}</style>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" fill=\"#ffffff\"/>\n";
  s += "<text x=\"800.00\" y=\"45.00\" text-anchor=\"middle\" font-size=\"24\">" +
       escape(d.focal) + "</text>\n";
  s += "<text x=\"800.00\" y=\"70.00\" text-anchor=\"middle\" font-size=\"13\">offset norm " +
       num(d.offset_norm) + ", " + std::to_string(d.records.size()) + " words</text>\n";

  // Grid and ticks.
  const double step = nice_step(2.0 * limit);
  for (double t = std::ceil(-limit / step) * step; t <= limit + 1e-12; t += step) {
    const double v = std::abs(t) < step * 1e-9 ? 0.0 : t;
    s += "<line class=\"grid\" x1=\"" + num(sx(v)) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(sx(v)) +
         "\" y2=\"" + num(kBottom) + "\"/>\n";
    s += "<line class=\"grid\" x1=\"" + num(kLeft) + "\" y1=\"" + num(sy(v)) + "\" x2=\"" + num(kRight) +
         "\" y2=\"" + num(sy(v)) + "\"/>\n";
    s += "<text class=\"tick\" x=\"" + num(sx(v)) + "\" y=\"" + num(kBottom + 20.0) +
         "\" text-anchor=\"middle\">" + num(v) + "</text>\n";
    s += "<text class=\"tick\" x=\"" + num(kLeft - 8.0) + "\" y=\"" + num(sy(v) + 4.0) +
         "\" text-anchor=\"end\">" + num(v) + "</text>\n";
  }
  s += "<rect class=\"axis\" fill=\"none\" x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
       num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) + "\"/>\n";
  s += "<line class=\"axis\" x1=\"" + num(sx(0)) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(sx(0)) +
       "\" y2=\"" + num(kBottom) + "\"/>\n";
  s += "<line class=\"axis\" x1=\"" + num(kLeft) + "\" y1=\"" + num(sy(0)) + "\" x2=\"" + num(kRight) +
       "\" y2=\"" + num(sy(0)) + "\"/>\n";
  s += "<line class=\"diag\" x1=\"" + num(sx(-limit)) + "\" y1=\"" + num(sy(-limit)) + "\" x2=\"" +
       num(sx(limit)) + "\" y2=\"" + num(sy(limit)) + "\"/>\n";

  s += "<text class=\"label\" x=\"" + num(0.5 * (kLeft + kRight)) + "\" y=\"" + num(kBottom + 55.0) +
       "\" text-anchor=\"middle\">projection in corpus 1 (" + escape(d.focal) + " translates to " +
       escape(d.translation_1to2) + " in corpus 2)</text>\n";
  const double ymid = 0.5 * (kTop + kBottom);
  s += "<text class=\"label\" x=\"40.00\" y=\"" + num(ymid) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 40.00 " + num(ymid) +
       ")\">projection in corpus 2 (" + escape(d.focal) + " translates to " +
       escape(d.translation_2to1) + " in corpus 1)</text>\n";

  // Legend.
  const EcClass classes[] = {EcClass::Both, EcClass::Only1, EcClass::Only2, EcClass::Neither};
  const char* names[] = {"excess co-occurrence in both", "only in corpus 1", "only in corpus 2",
                         "in neither"};
  for (int k = 0; k < 4; ++k) {
    const double x = kLeft + 20.0 + 330.0 * k;
    s += "<circle cx=\"" + num(x) + "\" cy=\"" + num(kBottom + 95.0) + "\" r=\"6.00\" fill=\"" +
         color(classes[k]) + "\" stroke=\"" + color(classes[k]) + "\"/>\n";
    s += "<text class=\"label\" x=\"" + num(x + 12.0) + "\" y=\"" + num(kBottom + 100.0) + "\">" +
         names[k] + "</text>\n";
  }

  // Markers.
  std::vector<double> radius(d.records.size());
  for (std::size_t i = 0; i < d.records.size(); ++i) {
    const auto& r = d.records[i];
    const double f = 0.5 * (static_cast<double>(r.freq1) + static_cast<double>(r.freq2));
    radius[i] = max_freq > 0.0 ? std::max(kMinRadius, kMaxRadius * std::pow(f / max_freq, 0.25))
                               : kMinRadius;
    s += "<circle cx=\"" + num(sx(r.alpha1)) + "\" cy=\"" + num(sy(r.alpha2)) + "\" r=\"" +
         num(radius[i]) + "\" fill=\"" + color(r.ec_class) + "\" stroke=\"" + color(r.ec_class) +
         "\"/>\n";
  }

  // Greedy label placement, most extreme records first.
  std::vector<std::size_t> order(d.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ka = std::abs(d.records[a].alpha1) + std::abs(d.records[a].alpha2);
    const double kb = std::abs(d.records[b].alpha1) + std::abs(d.records[b].alpha2);
    return ka > kb;
  });
  if (order.size() > options.label_count) order.resize(options.label_count);
  std::vector<Box> placed;
  for (std::size_t i : order) {
    const auto& r = d.records[i];
    const double cx = sx(r.alpha1);
    const double cy = sy(r.alpha2);
    const double w = 0.6 * kFontSize * static_cast<double>(r.token.size());
    const double h = kFontSize;
    const double gap = radius[i] + 2.0;
    const Box candidates[] = {
        {cx + gap, cy - h / 2, cx + gap + w, cy + h / 2},
        {cx - gap - w, cy - h / 2, cx - gap, cy + h / 2},
        {cx - w / 2, cy - gap - h, cx + w / 2, cy - gap},
        {cx - w / 2, cy + gap, cx + w / 2, cy + gap + h},
    };
    for (const Box& b : candidates) {
      if (!b.inside()) continue;
      if (std::any_of(placed.begin(), placed.end(), [&](const Box& o) { return o.overlaps(b); }))
        continue;
      placed.push_back(b);
      s += "<text class=\"label\" x=\"" + num(b.x0) + "\" y=\"" + num(b.y1 - 2.0) + "\">" +
           escape(r.token) + "</text>\n";
      break;
    }
  }
  s += "</svg>\n";
  return s;
}

}  // namespace dialectoscope
