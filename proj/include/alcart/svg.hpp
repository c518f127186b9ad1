#pragma once

// Minimal deterministic SVG 1.1 writer. Coordinates are printed with a fixed
// number of decimals so identical inputs give identical bytes.

#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace alcart::svg {

inline std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s(buf);
  if (s == "-0.00") s = "0.00";
  return s;
}

inline std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

/// Fixed palette, cycled by series index.
inline std::string_view color(std::size_t i) {
  static constexpr std::string_view palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  return palette[i % std::size(palette)];
}

class Document {
 public:
  Document(double width, double height) : width_(width), height_(height) {}

  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0) {
    body_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
          << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"/>\n";
  }

  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none") {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
          << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void circle(double cx, double cy, double r, std::string_view fill, double opacity = 1.0) {
    body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r) << "\" fill=\"" << fill
          << "\" fill-opacity=\"" << num(opacity) << "\"/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view stroke, double width = 1.5) {
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
    body_ << "\"/>\n";
  }

  void polygon(const std::vector<std::pair<double, double>>& pts, std::string_view fill, double opacity) {
    body_ << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << num(opacity) << "\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << num(pts[i].first) << ',' << num(pts[i].second);
    body_ << "\"/>\n";
  }

  void text(double x, double y, std::string_view s, double size = 12.0, std::string_view anchor = "start") {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\""
          << num(size) << "\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
  }

  std::string str() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width_) << "\" height=\""
       << num(height_) << "\" viewBox=\"0 0 " << num(width_) << ' ' << num(height_) << "\">\n"
       << "<rect x=\"0\" y=\"0\" width=\"" << num(width_) << "\" height=\"" << num(height_) << "\" fill=\"white\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  double width_, height_;
  std::ostringstream body_;
};

/// Plot area with linear data-to-pixel mapping and framed axes.
struct Frame {
  double left = 70, top = 40, width = 560, height = 360;
  double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

  double px(double x) const { return left + (x_max > x_min ? (x - x_min) / (x_max - x_min) : 0.5) * width; }
  double py(double y) const { return top + height - (y_max > y_min ? (y - y_min) / (y_max - y_min) : 0.5) * height; }

  void draw_axes(Document& doc, std::string_view title, std::string_view x_label, std::string_view y_label,
                 int ticks = 5) const {
    doc.rect(left, top, width, height, "none", "#333333");
    for (int i = 0; i <= ticks; ++i) {
      const double fx = x_min + (x_max - x_min) * i / ticks;
      const double fy = y_min + (y_max - y_min) * i / ticks;
      doc.line(px(fx), top + height, px(fx), top + height + 5, "#333333");
      doc.text(px(fx), top + height + 18, num(fx), 10, "middle");
      doc.line(left - 5, py(fy), left, py(fy), "#333333");
      doc.text(left - 8, py(fy) + 3, num(fy), 10, "end");
    }
    doc.text(left + width / 2, top - 15, title, 14, "middle");
    doc.text(left + width / 2, top + height + 38, x_label, 12, "middle");
    doc.text(18, top + height / 2, y_label, 12, "middle");
  }
};

}  // namespace alcart::svg
