#include "cover/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cover {

namespace {

constexpr double kMaxX1 = 0.0741;
constexpr double kMaxY1 = 0.0976;
constexpr double kMaxSegDist = 0.148;
constexpr double kMaxYExtent = 0.439;
constexpr double kMaxXExtent = 0.636;
// Horizontal reach of the segment and the rectangle inside the reduced
// domain: 0.148 + 0.25 and 0.0741 + v/2 rounded up.
constexpr double kSegReachX = 0.398;
constexpr double kRectReachX = 0.2378;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

Box5 reduced_domain() {
    return Box5{{0.0, 0.0, -kMaxSegDist, -kMaxSegDist, 0.0},
                {kMaxX1, kMaxY1, kMaxSegDist, kMaxSegDist, std::numbers::pi}};
}

void LemmaReport::add(std::string name, double value, double bound, double margin,
                      double eps_fp) {
    const bool pass = margin > eps_fp;
    checks.push_back({std::move(name), value, bound, margin, pass});
    all_pass = all_pass && pass;
}

std::string LemmaReport::to_text() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.pass ? "  [ok]   " : "  [FAIL] ") << c.name << ": value "
           << format_double(c.value) << ", bound " << format_double(c.bound)
           << ", margin " << format_double(c.margin) << "\n";
    }
    return os.str();
}

std::string LemmaReport::to_kv(const std::string& prefix) const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << prefix << c.name << ".value=" << format_double(c.value) << "\n"
           << prefix << c.name << ".margin=" << format_double(c.margin) << "\n"
           << prefix << c.name << ".pass=" << (c.pass ? "true" : "false") << "\n";
    }
    os << prefix << "all_pass=" << (all_pass ? "true" : "false") << "\n";
    return os.str();
}

double circle_rect_area(double x1, double y1, const ShapeSpec& spec) {
    thread_local std::unique_ptr<ConfigObjective> cached;
    if (!cached || !(cached->spec() == spec))
        cached = std::make_unique<ConfigObjective>(spec);
    return cached->circle_rect_area(x1, y1);
}

double trapezoid_bound(double dist, const ShapeSpec& spec) {
    if (!(dist >= 0.0)) throw std::domain_error("trapezoid_bound: negative distance");
    const double r = spec.circle_radius();
    const int n = spec.circle_vertices;
    const double circle_area =
        n * (r * r / 2.0) * std::sin(2.0 * std::numbers::pi / n);
    const double base = 2.0 * r * std::cos(std::numbers::pi / n);
    return 0.5 * (spec.segment_length + base) * dist + 0.5 * circle_area;
}

double y_extent_bound(double extent, const ShapeSpec& spec) {
    const double u = spec.rect_height;
    if (!(extent >= u)) throw std::domain_error("y_extent_bound: extent below rectangle height");
    const double v = 0.5 - u;
    return u * v + 0.5 * v * (extent - u);
}

LemmaReport check_domain_reduction(const ShapeSpec& spec, double eps_fp,
                                   double threshold) {
    LemmaReport report;
    const double psi_x = circle_rect_area(kMaxX1, 0.0, spec);
    report.add("circle_rect_at_x_edge", psi_x, threshold, psi_x - threshold, eps_fp);
    const double psi_y = circle_rect_area(0.0, kMaxY1, spec);
    report.add("circle_rect_at_y_edge", psi_y, threshold, psi_y - threshold, eps_fp);
    const double trap = trapezoid_bound(kMaxSegDist, spec);
    report.add("segment_distance_bound", trap, threshold, trap - threshold, eps_fp);
    const double yext = y_extent_bound(kMaxYExtent, spec);
    report.add("vertical_extent_bound", yext, threshold, yext - threshold, eps_fp);
    const double xext = kSegReachX + kRectReachX;
    report.add("horizontal_extent_bound", xext, kMaxXExtent, kMaxXExtent - xext,
               eps_fp);
    return report;
}

namespace {

double circle_rect_diameter(double x1, double y1, const ShapeSpec& spec) {
    const auto circle = circle_polygon(spec);
    const auto rect = rectangle_points({x1, y1, 0, 0, 0}, spec);
    std::vector<Point> pts = circle->vertices;
    pts.insert(pts.end(), rect.begin(), rect.end());
    return diameter(pts);
}

}  // namespace

LemmaReport check_diameter_claim(const ShapeSpec& spec, double eps_fp) {
    LemmaReport report;
    double worst = 0.0;
    for (double x1 : {0.0, kMaxX1})
        for (double y1 : {0.0, kMaxY1})
            worst = std::max(worst, circle_rect_diameter(x1, y1, spec));
    report.add("circle_rect_diameter", worst, 0.45976, 0.45976 - worst, eps_fp);

    const double diag = std::hypot(spec.rect_width, spec.rect_height);
    report.add("rect_diagonal", diag, 0.37007, 0.37007 - diag, eps_fp);
    return report;
}

double circle_rect_diameter_bound(const ShapeSpec& spec) {
    const LemmaReport report = check_diameter_claim(spec);
    if (!report.all_pass)
        throw std::logic_error("diameter claim failed:\n" + report.to_text());
    return report.checks.front().value;
}

LemmaReport check_lipschitz_derivations(const ShapeSpec& spec, double eps_fp) {
    const LipschitzConstants c;
    const double u = spec.rect_height;
    const double v = spec.rect_width;
    const double r = spec.circle_radius();

    LemmaReport report;
    const double d1 = (kMaxYExtent + u) / 2.0;
    report.add("c1_derivation", d1, c.c1, c.c1 - d1, eps_fp);
    const double d2 = (v + (kMaxSegDist + 0.25 + r)) / 2.0;
    report.add("c2_derivation", d2, c.c2, c.c2 - d2, eps_fp);
    const double d3 = (kMaxYExtent + (kMaxY1 + u / 2.0 + r)) / 2.0;
    report.add("c3_derivation", d3, c.c3, c.c3 - d3, eps_fp);
    const double d4 = (spec.segment_length + (kMaxX1 + v / 2.0 + r)) / 2.0;
    report.add("c4_derivation", d4, c.c4, c.c4 - d4, eps_fp);
    const double d5 = 0.45976 / 4.0;
    report.add("c5_derivation", d5, c.c5, c.c5 - d5, eps_fp);
    return report;
}

LipschitzConstants lipschitz_constants(const ShapeSpec& spec) {
    const LemmaReport report = check_lipschitz_derivations(spec);
    if (!report.all_pass)
        throw std::logic_error("Lipschitz derivation failed:\n" + report.to_text());
    return LipschitzConstants{};
}

ValidationReport validate_lipschitz(int samples, double step, std::uint64_t seed,
                                    const ShapeSpec& spec) {
    if (samples < 1) throw std::domain_error("validate_lipschitz: need samples >= 1");
    if (!(step > 0.0)) throw std::domain_error("validate_lipschitz: need step > 0");

    ValidationReport report;
    report.samples = samples;
    report.step = step;
    report.seed = seed;
    report.constants = LipschitzConstants{};

    const Box5 domain = reduced_domain();
    ConfigObjective objective(spec);
    std::mt19937_64 rng(seed);

    for (int s = 0; s < samples; ++s) {
        std::array<double, 5> z{};
        for (std::size_t i = 0; i < 5; ++i)
            z[i] = domain.lo[i] + (domain.hi[i] - domain.lo[i]) * uniform01(rng);
        const double base = objective(ConfigParams::from_array(z));
        for (std::size_t i = 0; i < 5; ++i) {
            auto zi = z;
            zi[i] += step;
            const double slope =
                std::abs(objective(ConfigParams::from_array(zi)) - base) / step;
            report.max_slope[i] = std::max(report.max_slope[i], slope);
        }
    }

    const auto limits = report.constants.as_array();
    report.pass = true;
    for (std::size_t i = 0; i < 5; ++i)
        report.pass = report.pass && report.max_slope[i] <= limits[i] + 1e-6;
    return report;
}

std::string ValidationReport::to_text() const {
    std::ostringstream os;
    const auto limits = constants.as_array();
    os << "  directional slopes over " << samples << " samples, step " << step
       << ":\n";
    for (std::size_t i = 0; i < 5; ++i) {
        const bool ok = max_slope[i] <= limits[i] + 1e-6;
        os << (ok ? "  [ok]   " : "  [FAIL] ") << "dim " << i + 1 << ": max slope "
           << format_double(max_slope[i]) << " vs constant "
           << format_double(limits[i]) << "\n";
    }
    return os.str();
}

std::string ValidationReport::to_kv(const std::string& prefix) const {
    std::ostringstream os;
    const auto limits = constants.as_array();
    os << prefix << "samples=" << samples << "\n"
       << prefix << "step=" << format_double(step) << "\n";
    for (std::size_t i = 0; i < 5; ++i)
        os << prefix << "max_slope_" << i + 1 << "=" << format_double(max_slope[i])
           << "\n"
           << prefix << "constant_" << i + 1 << "=" << format_double(limits[i])
           << "\n";
    os << prefix << "pass=" << (pass ? "true" : "false") << "\n";
    return os.str();
}

}  // namespace cover
