#include "cover/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cover {

double distance(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

namespace {

// Andrew monotone chain over sorted points. Writes the closed hull into
// `hull` (last vertex repeats the first) and returns the open vertex count.
// Collinear points are dropped, so the result is strictly convex.
std::size_t scan_hull_sorted(std::span<const Point> p, std::vector<Point>& hull) {
    const std::size_t n = p.size();
    hull.resize(2 * n + 2);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
        hull[k++] = p[i];
    }
    const std::size_t lower_end = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower_end && cross(hull[k - 2], hull[k - 1], p[i]) <= 0.0) --k;
        hull[k++] = p[i];
    }
    return k > 1 ? k - 1 : k;
}

double shoelace(std::span<const Point> v) {
    const std::size_t n = v.size();
    if (n < 3) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        s += v[j].x * v[i].y - v[i].x * v[j].y;
    return 0.5 * std::abs(s);
}

}  // namespace

Polygon convex_hull(std::span<const Point> points) {
    if (points.empty()) throw std::domain_error("convex_hull: empty input");
    for (const Point& p : points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::domain_error("convex_hull: non-finite coordinate");

    std::vector<Point> pts(points.begin(), points.end());
    std::sort(pts.begin(), pts.end(), lex_less);
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Point& a, const Point& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());

    if (pts.size() == 1) return Polygon{{pts[0]}};

    std::vector<Point> hull;
    const std::size_t k = scan_hull_sorted(pts, hull);
    hull.resize(k);
    return Polygon{std::move(hull)};
}

double polygon_area(const Polygon& poly) { return shoelace(poly.vertices); }

double polygon_perimeter(const Polygon& poly) {
    const auto& v = poly.vertices;
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) s += distance(v[j], v[i]);
    return s;
}

Polygon regular_polygon_circumradius(int n, double circumradius, double phase) {
    if (n < 3) throw std::domain_error("regular_polygon: need n >= 3");
    if (!(circumradius > 0.0))
        throw std::domain_error("regular_polygon: circumradius must be positive");
    Polygon poly;
    poly.vertices.reserve(static_cast<std::size_t>(n));
    const double step = 2.0 * std::numbers::pi / n;
    for (int k = 0; k < n; ++k) {
        const double a = phase + step * k;
        poly.vertices.push_back({circumradius * std::cos(a), circumradius * std::sin(a)});
    }
    return poly;
}

Polygon regular_polygon(int n, double perimeter, double phase) {
    if (n < 3) throw std::domain_error("regular_polygon: need n >= 3");
    if (!(perimeter > 0.0))
        throw std::domain_error("regular_polygon: perimeter must be positive");
    const double rho = perimeter / (2.0 * n * std::sin(std::numbers::pi / n));
    return regular_polygon_circumradius(n, rho, phase);
}

std::vector<Point> transform(std::span<const Point> points, Point translation,
                             double rotation) {
    const double c = std::cos(rotation);
    const double s = std::sin(rotation);
    std::vector<Point> out;
    out.reserve(points.size());
    for (const Point& p : points)
        out.push_back({c * p.x - s * p.y + translation.x,
                       s * p.x + c * p.y + translation.y});
    return out;
}

double diameter(std::span<const Point> points) {
    if (points.size() < 2) throw std::domain_error("diameter: need >= 2 points");
    const Polygon hull = convex_hull(points);
    const auto& v = hull.vertices;
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = i + 1; j < v.size(); ++j)
            best = std::max(best, distance(v[i], v[j]));
    return best;
}

double hull_area_sorted(std::span<const Point> sorted, std::vector<Point>& hull) {
    if (sorted.size() < 3) return 0.0;
    const std::size_t k = scan_hull_sorted(sorted, hull);
    return shoelace(std::span<const Point>(hull.data(), k));
}

MergedHullArea::MergedHullArea(std::span<const Point> fixed_points) {
    auto sorted = std::make_shared<std::vector<Point>>(fixed_points.begin(),
                                                       fixed_points.end());
    std::sort(sorted->begin(), sorted->end(), lex_less);
    fixed_sorted_ = std::move(sorted);
    std::vector<Point> scratch;
    fixed_area_ = hull_area_sorted(*fixed_sorted_, scratch);
    merged_.reserve(fixed_sorted_->size() + 16);
    hull_.reserve(2 * (fixed_sorted_->size() + 16) + 2);
}

double MergedHullArea::area_with(std::span<const Point> extra) {
    const auto& fixed = *fixed_sorted_;
    extra_.assign(extra.begin(), extra.end());
    // Insertion sort: the extras are few.
    for (std::size_t i = 1; i < extra_.size(); ++i) {
        Point key = extra_[i];
        std::size_t j = i;
        while (j > 0 && lex_less(key, extra_[j - 1])) {
            extra_[j] = extra_[j - 1];
            --j;
        }
        extra_[j] = key;
    }
    merged_.resize(fixed.size() + extra_.size());
    std::merge(fixed.begin(), fixed.end(), extra_.begin(), extra_.end(),
               merged_.begin(), lex_less);
    return hull_area_sorted(merged_, hull_);
}

}  // namespace cover
