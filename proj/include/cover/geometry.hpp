#pragma once

#include <memory>
#include <span>
#include <vector>

namespace cover {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

inline bool lex_less(const Point& a, const Point& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

// z-component of (b-a) x (c-a); positive when a,b,c turn counter-clockwise.
inline double cross(const Point& a, const Point& b, const Point& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double distance(const Point& a, const Point& b);

// Convex boundary, counter-clockwise, no collinear interior vertices.
// Hull construction may emit a degenerate 2-gon (collinear input) or a
// single vertex (all input points equal).
struct Polygon {
    std::vector<Point> vertices;
};

Polygon convex_hull(std::span<const Point> points);
double polygon_area(const Polygon& poly);
// Closed-walk length; a 2-gon counts its single edge twice.
double polygon_perimeter(const Polygon& poly);

Polygon regular_polygon_circumradius(int n, double circumradius, double phase);
// Regular n-gon with the given perimeter, centroid at the origin, first
// vertex at angle `phase`.
Polygon regular_polygon(int n, double perimeter, double phase);

// Rigid motion: rotate about the origin, then translate.
std::vector<Point> transform(std::span<const Point> points, Point translation,
                             double rotation);

double diameter(std::span<const Point> points);

// Hull-area evaluator for a fixed point set plus a few points that move on
// every call. The fixed set is sorted once; per call the extras are
// insertion-sorted, merged, and a single monotone-chain scan gives the area.
// Copies share the prepared fixed set but get independent scratch buffers,
// so one instance per worker is safe.
class MergedHullArea {
public:
    MergedHullArea() = default;
    explicit MergedHullArea(std::span<const Point> fixed_points);

    double area_with(std::span<const Point> extra);
    double fixed_area() const { return fixed_area_; }
    std::size_t fixed_count() const { return fixed_sorted_ ? fixed_sorted_->size() : 0; }

private:
    std::shared_ptr<const std::vector<Point>> fixed_sorted_;
    double fixed_area_ = 0.0;
    std::vector<Point> extra_;
    std::vector<Point> merged_;
    std::vector<Point> hull_;
};

// Area of the convex hull of lexicographically sorted points (duplicates
// tolerated). `hull` is scratch, resized as needed.
double hull_area_sorted(std::span<const Point> sorted, std::vector<Point>& hull);

}  // namespace cover
