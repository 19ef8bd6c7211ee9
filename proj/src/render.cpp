#include "cover/render.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace cover {

namespace {

// World box: the 0.636 x 0.439 bounding rectangle of any low-area
// configuration, plus margin.
constexpr double kWorldHalfX = 0.36;
constexpr double kWorldHalfY = 0.28;
constexpr double kScale = 1000.0;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string svg_x(double x) { return fmt(kScale * (x + kWorldHalfX)); }
std::string svg_y(double y) { return fmt(kScale * (kWorldHalfY - y)); }

void emit_polygon(std::ostringstream& os, const std::vector<Point>& pts,
                  const char* style) {
    os << "  <polygon points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) os << ' ';
        os << svg_x(pts[i].x) << ',' << svg_y(pts[i].y);
    }
    os << "\" style=\"" << style << "\"/>\n";
}

}  // namespace

std::string config_svg(const ConfigParams& params, const ShapeSpec& spec) {
    const auto circle = circle_polygon(spec);
    const auto rect = rectangle_points(params, spec);
    const auto seg = segment_points(params, spec);

    std::vector<Point> all = circle->vertices;
    all.insert(all.end(), rect.begin(), rect.end());
    all.insert(all.end(), seg.begin(), seg.end());
    const Polygon hull = convex_hull(all);
    const double area = polygon_area(hull);

    const int width = static_cast<int>(2 * kWorldHalfX * kScale);
    const int height = static_cast<int>(2 * kWorldHalfY * kScale);

    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
       << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
       << height << "\">\n";
    os << "  <rect width=\"" << width << "\" height=\"" << height
       << "\" fill=\"white\"/>\n";

    emit_polygon(os, hull.vertices,
                 "fill:none;stroke:#222222;stroke-width:3");
    emit_polygon(os, circle->vertices,
                 "fill:#9ecae1;fill-opacity:0.55;stroke:#3182bd;stroke-width:1.5");
    emit_polygon(os, {rect.begin(), rect.end()},
                 "fill:#a1d99b;fill-opacity:0.55;stroke:#31a354;stroke-width:1.5");
    os << "  <line x1=\"" << svg_x(seg[0].x) << "\" y1=\"" << svg_y(seg[0].y)
       << "\" x2=\"" << svg_x(seg[1].x) << "\" y2=\"" << svg_y(seg[1].y)
       << "\" style=\"stroke:#e6550d;stroke-width:3\"/>\n";

    char area_text[64];
    std::snprintf(area_text, sizeof(area_text), "area = %.6f", area);
    os << "  <text x=\"16\" y=\"28\" font-family=\"monospace\" font-size=\"22\" "
          "fill=\"#333333\">"
       << area_text << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

void render_config_svg(const ConfigParams& params, const std::string& out_path,
                       const ShapeSpec& spec) {
    std::ofstream os(out_path, std::ios::binary);
    if (!os) throw std::runtime_error("render: cannot write " + out_path);
    os << config_svg(params, spec);
    if (!os) throw std::runtime_error("render: write failed for " + out_path);
}

}  // namespace cover
