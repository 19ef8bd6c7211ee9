#pragma once

#include <array>
#include <memory>

#include "cover/geometry.hpp"

namespace cover {

// Placement of the rectangle center (x1,y1) and the segment center (x2,y2)
// with segment direction theta, relative to the circle fixed at the origin.
struct ConfigParams {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;
    double theta = 0.0;

    std::array<double, 5> as_array() const { return {x1, y1, x2, y2, theta}; }
    static ConfigParams from_array(const std::array<double, 5>& a) {
        return {a[0], a[1], a[2], a[3], a[4]};
    }
};

// The three certified shapes: a circle of unit perimeter (approximated by an
// inscribed regular polygon), a rectangle of perimeter 1, and a segment of
// length 1/2.
struct ShapeSpec {
    double rect_height = 0.1727;          // u
    double rect_width = 0.5 - 0.1727;     // v = 1/2 - u
    int circle_vertices = 500;
    double circle_perimeter = 1.0;
    double segment_length = 0.5;

    double circle_radius() const;  // circumradius of the inscribed polygon

    bool operator==(const ShapeSpec&) const = default;
};

// Regular polygon inscribed in the circle: vertices on the circle of radius
// circle_radius(), phase 0, so the diagonal through vertices 0 and n/2 lies
// on the x-axis (parallel to the rectangle sides). Shared and immutable.
std::shared_ptr<const Polygon> circle_polygon(const ShapeSpec& spec);

// Rectangle corners, counter-clockwise from the top-left.
std::array<Point, 4> rectangle_points(const ConfigParams& p, const ShapeSpec& spec);
std::array<Point, 2> segment_points(const ConfigParams& p, const ShapeSpec& spec);

// Area of the convex hull of the full configuration. Holds scratch buffers,
// so copies (one per worker) evaluate concurrently; a single instance is not
// re-entrant.
class ConfigObjective {
public:
    explicit ConfigObjective(const ShapeSpec& spec = {});

    double operator()(const ConfigParams& p);
    // Hull area of the circle polygon and the rectangle only.
    double circle_rect_area(double x1, double y1);

    const ShapeSpec& spec() const { return spec_; }
    double circle_area() const { return eval_.fixed_area(); }

private:
    ShapeSpec spec_;
    MergedHullArea eval_;
};

// One-off evaluation; keeps a thread-local evaluator per spec.
double objective_area(const ConfigParams& p, const ShapeSpec& spec = {});

}  // namespace cover
