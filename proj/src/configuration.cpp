#include "cover/configuration.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace cover {

double ShapeSpec::circle_radius() const {
    return circle_perimeter / (2.0 * std::numbers::pi);
}

std::shared_ptr<const Polygon> circle_polygon(const ShapeSpec& spec) {
    static std::mutex mutex;
    static std::map<std::pair<int, double>, std::shared_ptr<const Polygon>> cache;

    const std::pair<int, double> key{spec.circle_vertices, spec.circle_perimeter};
    std::lock_guard lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    auto poly = std::make_shared<const Polygon>(regular_polygon_circumradius(
        spec.circle_vertices, spec.circle_radius(), 0.0));
    cache.emplace(key, poly);
    return poly;
}

std::array<Point, 4> rectangle_points(const ConfigParams& p, const ShapeSpec& spec) {
    const double hw = 0.5 * spec.rect_width;
    const double hh = 0.5 * spec.rect_height;
    return {Point{p.x1 - hw, p.y1 + hh}, Point{p.x1 + hw, p.y1 + hh},
            Point{p.x1 + hw, p.y1 - hh}, Point{p.x1 - hw, p.y1 - hh}};
}

std::array<Point, 2> segment_points(const ConfigParams& p, const ShapeSpec& spec) {
    const double h = 0.5 * spec.segment_length;
    const double c = std::cos(p.theta);
    const double s = std::sin(p.theta);
    return {Point{p.x2 - h * c, p.y2 - h * s}, Point{p.x2 + h * c, p.y2 + h * s}};
}

ConfigObjective::ConfigObjective(const ShapeSpec& spec)
    : spec_(spec), eval_(circle_polygon(spec)->vertices) {}

double ConfigObjective::operator()(const ConfigParams& p) {
    for (double v : p.as_array())
        if (!std::isfinite(v))
            throw std::domain_error("objective: non-finite parameter");
    const auto rect = rectangle_points(p, spec_);
    const auto seg = segment_points(p, spec_);
    const std::array<Point, 6> extra = {rect[0], rect[1], rect[2],
                                        rect[3], seg[0], seg[1]};
    return eval_.area_with(extra);
}

double ConfigObjective::circle_rect_area(double x1, double y1) {
    if (!std::isfinite(x1) || !std::isfinite(y1))
        throw std::domain_error("circle_rect_area: non-finite parameter");
    const auto rect = rectangle_points({x1, y1, 0, 0, 0}, spec_);
    return eval_.area_with(rect);
}

double objective_area(const ConfigParams& p, const ShapeSpec& spec) {
    thread_local std::unique_ptr<ConfigObjective> cached;
    if (!cached || !(cached->spec() == spec))
        cached = std::make_unique<ConfigObjective>(spec);
    return (*cached)(p);
}

}  // namespace cover
