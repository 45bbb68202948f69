#pragma once

#include <string>
#include <vector>

#include "hardylab/series.hpp"

namespace hardylab {

/// Minimal SVG writer for complex-plane pictures: a square world window
/// mapped onto a size x size canvas (y up).
class SvgCanvas {
public:
    SvgCanvas(cplx centre, double half_width, int size = 1024);

    void cell(cplx w, double dx, double dy, const std::string& fill);
    void polyline(const std::vector<cplx>& pts, const std::string& stroke, double width = 1.5, bool closed = true);
    void dot(cplx w, double radius_px, const std::string& fill);
    void legend(const std::string& label, const std::string& color);
    void title(const std::string& text);

    std::string str() const;
    void save(const std::string& path) const;

private:
    cplx centre_;
    double half_;
    int size_;
    std::vector<std::string> body_;
    std::vector<std::pair<std::string, std::string>> legend_;
    std::string title_;

    double px(double x) const;
    double py(double y) const;
};

/// Verdict colours shared by every plot.
namespace svg_colors {
inline constexpr const char* in = "#2e7d32";
inline constexpr const char* out = "#c62828";
inline constexpr const char* undetermined = "#9e9e9e";
inline constexpr const char* curve = "#1a237e";
}  // namespace svg_colors

}  // namespace hardylab
