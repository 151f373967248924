#include "feedmine/svg.hpp"

#include "feedmine/errors.hpp"

#include <cstdio>
#include <fstream>

namespace feedmine::svg {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s = buf;
    if (s == "-0.00")
        s = "0.00";
    return s;
}

} // namespace

std::string escape_text(const std::string &s) {
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

Canvas::Canvas(double width, double height) : width_(width), height_(height) {}

void Canvas::line(double x1, double y1, double x2, double y2, const std::string &stroke,
                  double stroke_width, const std::string &dash) {
    std::string e = "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                    "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                    num(stroke_width) + "\"";
    if (!dash.empty())
        e += " stroke-dasharray=\"" + dash + "\"";
    e += "/>";
    elements_.push_back(std::move(e));
}

void Canvas::polyline(const std::vector<std::pair<double, double>> &pts, const std::string &stroke,
                      double stroke_width) {
    std::string p;
    for (const auto &[x, y] : pts) {
        if (!p.empty())
            p.push_back(' ');
        p += num(x) + "," + num(y);
    }
    elements_.push_back("<polyline points=\"" + p + "\" fill=\"none\" stroke=\"" + stroke +
                        "\" stroke-width=\"" + num(stroke_width) + "\"/>");
}

void Canvas::polygon(const std::vector<std::pair<double, double>> &pts, const std::string &fill,
                     double opacity) {
    std::string p;
    for (const auto &[x, y] : pts) {
        if (!p.empty())
            p.push_back(' ');
        p += num(x) + "," + num(y);
    }
    elements_.push_back("<polygon points=\"" + p + "\" fill=\"" + fill + "\" fill-opacity=\"" +
                        num(opacity) + "\" stroke=\"none\"/>");
}

void Canvas::circle(double cx, double cy, double r, const std::string &fill) {
    elements_.push_back("<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
                        "\" fill=\"" + fill + "\"/>");
}

void Canvas::text(double x, double y, const std::string &content, int font_size,
                  const std::string &anchor, double rotate_deg) {
    std::string e = "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
                    std::to_string(font_size) + "\" font-family=\"sans-serif\" text-anchor=\"" +
                    anchor + "\"";
    if (rotate_deg != 0.0)
        e += " transform=\"rotate(" + num(rotate_deg) + " " + num(x) + " " + num(y) + ")\"";
    e += ">" + escape_text(content) + "</text>";
    elements_.push_back(std::move(e));
}

void Canvas::rect(double x, double y, double w, double h, const std::string &fill) {
    elements_.push_back("<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
                        "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"/>");
}

std::string Canvas::str() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
                      "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
                      num(height_) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
           "\" fill=\"white\"/>\n";
    for (const auto &e : elements_) {
        out += e;
        out.push_back('\n');
    }
    out += "</svg>\n";
    return out;
}

void Canvas::write_file(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write SVG file: " + path);
    out << str();
}

} // namespace feedmine::svg
