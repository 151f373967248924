#pragma once

#include <string>
#include <vector>

namespace feedmine::svg {

/// Tiny deterministic SVG builder: fixed 2-decimal coordinates so identical
/// inputs always render byte-identical files.
class Canvas {
  public:
    Canvas(double width, double height);

    void line(double x1, double y1, double x2, double y2, const std::string &stroke,
              double stroke_width = 1.0, const std::string &dash = "");
    void polyline(const std::vector<std::pair<double, double>> &pts, const std::string &stroke,
                  double stroke_width = 1.5);
    void polygon(const std::vector<std::pair<double, double>> &pts, const std::string &fill,
                 double opacity = 1.0);
    void circle(double cx, double cy, double r, const std::string &fill);
    void text(double x, double y, const std::string &content, int font_size = 10,
              const std::string &anchor = "start", double rotate_deg = 0.0);
    void rect(double x, double y, double w, double h, const std::string &fill);

    std::string str() const;
    void write_file(const std::string &path) const;

  private:
    double width_, height_;
    std::vector<std::string> elements_;
};

std::string escape_text(const std::string &s);

} // namespace feedmine::svg
