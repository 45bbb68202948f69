#include "hardylab/svg.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hardylab {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
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

}  // namespace

SvgCanvas::SvgCanvas(cplx centre, double half_width, int size) : centre_(centre), half_(half_width), size_(size) {
    if (!(half_width > 0.0) || size < 16) throw std::invalid_argument("SvgCanvas: bad window");
}

double SvgCanvas::px(double x) const { return (x - centre_.real() + half_) / (2.0 * half_) * size_; }
double SvgCanvas::py(double y) const { return (centre_.imag() + half_ - y) / (2.0 * half_) * size_; }

void SvgCanvas::cell(cplx w, double dx, double dy, const std::string& fill) {
    const double x0 = px(w.real() - dx / 2), y0 = py(w.imag() + dy / 2);
    const double wpx = dx / (2.0 * half_) * size_, hpx = dy / (2.0 * half_) * size_;
    body_.push_back("<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(wpx) + "\" height=\"" +
                    fmt(hpx) + "\" fill=\"" + fill + "\" shape-rendering=\"crispEdges\"/>");
}

void SvgCanvas::polyline(const std::vector<cplx>& pts, const std::string& stroke, double width, bool closed) {
    if (pts.empty()) return;
    std::string d;
    for (const cplx p : pts) d += fmt(px(p.real())) + "," + fmt(py(p.imag())) + " ";
    body_.push_back(std::string("<") + (closed ? "polygon" : "polyline") + " points=\"" + d +
                    "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + fmt(width) + "\"/>");
}

void SvgCanvas::dot(cplx w, double radius_px, const std::string& fill) {
    body_.push_back("<circle cx=\"" + fmt(px(w.real())) + "\" cy=\"" + fmt(py(w.imag())) + "\" r=\"" +
                    fmt(radius_px) + "\" fill=\"" + fill + "\"/>");
}

void SvgCanvas::legend(const std::string& label, const std::string& color) { legend_.emplace_back(label, color); }

void SvgCanvas::title(const std::string& text) { title_ = text; }

std::string SvgCanvas::str() const {
    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size_ << "\" height=\"" << size_
      << "\" viewBox=\"0 0 " << size_ << " " << size_ << "\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    o << "<line x1=\"0\" y1=\"" << fmt(py(0)) << "\" x2=\"" << size_ << "\" y2=\"" << fmt(py(0))
      << "\" stroke=\"#cccccc\"/>\n";
    o << "<line x1=\"" << fmt(px(0)) << "\" y1=\"0\" x2=\"" << fmt(px(0)) << "\" y2=\"" << size_
      << "\" stroke=\"#cccccc\"/>\n";
    for (const auto& b : body_) o << b << "\n";
    if (!title_.empty())
        o << "<text x=\"12\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">" << escape(title_) << "</text>\n";
    int y = 48;
    if (!legend_.empty())
        o << "<rect x=\"6\" y=\"30\" width=\"230\" height=\"" << 20 * legend_.size() + 8
          << "\" fill=\"white\" fill-opacity=\"0.85\" stroke=\"#999999\"/>\n";
    for (const auto& [label, color] : legend_) {
        o << "<rect x=\"12\" y=\"" << y - 12 << "\" width=\"14\" height=\"14\" fill=\"" << color
          << "\" stroke=\"black\" stroke-width=\"0.5\"/>";
        o << "<text x=\"32\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"14\">" << escape(label)
          << "</text>\n";
        y += 20;
    }
    o << "</svg>\n";
    return o.str();
}

void SvgCanvas::save(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::invalid_argument("cannot write " + path);
    f << str();
}

}  // namespace hardylab
