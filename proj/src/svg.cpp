#include "rlflow/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace rlflow::svg {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;

std::string esc(const std::string& s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Axis {
  double lo, hi;
  double map(double v, double a, double b) const { return a + (v - lo) / (hi - lo) * (b - a); }
};

Axis padded(double lo, double hi) {
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

void header(std::ostringstream& o, const std::string& title) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << esc(title)
    << "</text>\n";
}

void x_ticks(std::ostringstream& o, const Axis& ax) {
  for (int k = 0; k <= 4; ++k) {
    const double v = ax.lo + (ax.hi - ax.lo) * k / 4.0;
    const double px = ax.map(v, kLeft, kWidth - kRight);
    o << "<line x1=\"" << num(px) << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << num(px) << "\" y2=\""
      << kHeight - kBottom + 5 << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << num(px) << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">" << tick(v)
      << "</text>\n";
  }
}

}  // namespace

std::string line_plot(const std::vector<double>& x, const std::vector<double>& y, const std::string& title,
                      const std::string& x_label, const std::string& y_label) {
  std::ostringstream o;
  header(o, title);
  if (x.empty() || x.size() != y.size()) {
    o << "</svg>\n";
    return o.str();
  }
  const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end());
  const double ymax = *std::max_element(y.begin(), y.end());
  Axis ax = padded(*xmin, *xmax);
  Axis ay{0.0, ymax > 0.0 ? 1.05 * ymax : 1.0};
  o << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
    << kHeight - kBottom << "\" stroke=\"black\"/>\n"
    << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kHeight - kBottom
    << "\" stroke=\"black\"/>\n";
  x_ticks(o, ax);
  for (int k = 0; k <= 4; ++k) {
    const double v = ay.hi * k / 4.0;
    const double py = ay.map(v, kHeight - kBottom, kTop);
    o << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << tick(v) << "</text>\n";
  }
  o << "<polyline fill=\"none\" stroke=\"#1f4e79\" stroke-width=\"1.5\" points=\"";
  for (std::size_t k = 0; k < x.size(); ++k)
    o << num(ax.map(x[k], kLeft, kWidth - kRight)) << ',' << num(ay.map(y[k], kHeight - kBottom, kTop)) << ' ';
  o << "\"/>\n"
    << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">"
    << esc(x_label) << "</text>\n"
    << "<text x=\"16\" y=\"" << (kTop + kHeight - kBottom) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << (kTop + kHeight - kBottom) / 2 << ")\">" << esc(y_label) << "</text>\n</svg>\n";
  return o.str();
}

std::string dot_plot(const std::vector<Interval>& rows, const std::string& title) {
  std::ostringstream o;
  header(o, title);
  if (rows.empty()) {
    o << "</svg>\n";
    return o.str();
  }
  double lo = 0.0, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min({lo, r.lo, r.estimate});
    hi = std::max({hi, r.hi, r.estimate});
  }
  const double left = 130;
  Axis ax = padded(lo, hi);
  const double band = (kHeight - kTop - kBottom) / static_cast<double>(rows.size());
  const double zero = ax.map(0.0, left, kWidth - kRight);
  o << "<line x1=\"" << num(zero) << "\" y1=\"" << kTop << "\" x2=\"" << num(zero) << "\" y2=\"" << kHeight - kBottom
    << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n"
    << "<line x1=\"" << left << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight << "\" y2=\""
    << kHeight - kBottom << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = ax.lo + (ax.hi - ax.lo) * k / 4.0;
    const double px = ax.map(v, left, kWidth - kRight);
    o << "<text x=\"" << num(px) << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">" << tick(v)
      << "</text>\n";
  }
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    const double py = kTop + band * (static_cast<double>(k) + 0.5);
    o << "<text x=\"" << left - 8 << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << esc(r.label)
      << "</text>\n"
      << "<line x1=\"" << num(ax.map(r.lo, left, kWidth - kRight)) << "\" y1=\"" << num(py) << "\" x2=\""
      << num(ax.map(r.hi, left, kWidth - kRight)) << "\" y2=\"" << num(py) << "\" stroke=\"#1f4e79\"/>\n"
      << "<circle cx=\"" << num(ax.map(r.estimate, left, kWidth - kRight)) << "\" cy=\"" << num(py)
      << "\" r=\"4\" fill=\"#1f4e79\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace rlflow::svg
