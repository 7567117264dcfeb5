#include "cidlab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cidlab/error.hpp"
#include "cidlab/sampling.hpp"

namespace cidlab::svg {

namespace {

constexpr double kWidth = 480.0, kHeight = 360.0, kMargin = 48.0;

struct Frame {
  double x0, x1, y0, y1;

  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

Frame frame_for(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  return {x0, x1, y0, y1};
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

void open(std::ostringstream& out, const std::string& title, const Frame& f) {
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
      << escape(title) << "</text>\n"
      << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
      << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#444\"/>\n";
  out.precision(4);
  out << "<text x=\"" << kMargin << "\" y=\"" << kHeight - kMargin + 14 << "\">" << f.x0 << "</text>\n"
      << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - kMargin + 14
      << "\" text-anchor=\"end\">" << f.x1 << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kHeight - kMargin << "\" text-anchor=\"end\">" << f.y0
      << "</text>\n"
      << "<text x=\"" << kMargin - 4 << "\" y=\"" << kMargin + 8 << "\" text-anchor=\"end\">" << f.y1
      << "</text>\n";
  out.precision(6);
}

}  // namespace

std::string qq_normal(std::span<const double> samples, const std::string& title) {
  if (samples.empty()) throw SizeError("qq plot: no samples");
  std::vector<double> y(samples.begin(), samples.end());
  std::sort(y.begin(), y.end());
  const double r = static_cast<double>(y.size());
  std::vector<double> x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = normal_quantile((static_cast<double>(i) + 0.5) / r);
  const double lo = std::min(x.front(), y.front()), hi = std::max(x.back(), y.back());
  const Frame f = frame_for(lo, hi, lo, hi);
  std::ostringstream out;
  open(out, title, f);
  out << "<line x1=\"" << f.px(lo) << "\" y1=\"" << f.py(lo) << "\" x2=\"" << f.px(hi) << "\" y2=\""
      << f.py(hi) << "\" stroke=\"#c33\"/>\n";
  for (std::size_t i = 0; i < y.size(); ++i)
    out << "<circle cx=\"" << f.px(x[i]) << "\" cy=\"" << f.py(y[i]) << "\" r=\"1.5\" fill=\"#236\"/>\n";
  out << "</svg>\n";
  return out.str();
}

std::string histogram(std::span<const double> samples, const std::string& title, std::size_t bins) {
  if (samples.empty()) throw SizeError("histogram: no samples");
  if (bins == 0) throw ParameterError("histogram: bins must be positive");
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn, width = (*mx > *mn ? *mx - *mn : 1.0) / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double v : samples)
    counts[std::min(bins - 1, static_cast<std::size_t>((v - lo) / width))] += 1.0;
  const double top = *std::max_element(counts.begin(), counts.end());
  const Frame f = frame_for(lo, lo + width * static_cast<double>(bins), 0.0, top);
  std::ostringstream out;
  open(out, title, f);
  for (std::size_t b = 0; b < bins; ++b) {
    const double a = lo + width * static_cast<double>(b);
    out << "<rect x=\"" << f.px(a) << "\" y=\"" << f.py(counts[b]) << "\" width=\""
        << f.px(a + width) - f.px(a) << "\" height=\"" << f.py(0.0) - f.py(counts[b])
        << "\" fill=\"#6a8fc0\" stroke=\"white\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string curve(std::span<const double> x, std::span<const double> y, const std::string& title,
                  bool log_x) {
  if (x.size() != y.size() || x.empty()) throw SizeError("curve: need matching nonempty series");
  std::vector<double> xs(x.begin(), x.end());
  if (log_x)
    for (double& v : xs) {
      if (!(v > 0.0)) throw ParameterError("curve: log axis needs positive x");
      v = std::log10(v);
    }
  const auto [xmn, xmx] = std::minmax_element(xs.begin(), xs.end());
  const auto [ymn, ymx] = std::minmax_element(y.begin(), y.end());
  const Frame f = frame_for(*xmn, *xmx, std::min(0.0, *ymn), *ymx);
  std::ostringstream out;
  open(out, title + (log_x ? " (log10 x)" : ""), f);
  out << "<polyline fill=\"none\" stroke=\"#236\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) out << f.px(xs[i]) << "," << f.py(y[i]) << " ";
  out << "\"/>\n";
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << "<circle cx=\"" << f.px(xs[i]) << "\" cy=\"" << f.py(y[i]) << "\" r=\"3\" fill=\"#c33\"/>\n";
  out << "</svg>\n";
  return out.str();
}

}  // namespace cidlab::svg
