#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cover/box5.hpp"
#include "cover/configuration.hpp"

namespace cover {

// Floating-point slack subtracted from every certified margin. The true gap
// between the minimum (~0.10044) and the 0.1 threshold dwarfs it.
inline constexpr double kDefaultEpsFp = 1e-6;

// Parameter region outside which the geometric reduction already forces the
// objective above the threshold:
//   x1 in [0, 0.0741], y1 in [0, 0.0976],
//   x2, y2 in [-0.148, 0.148], theta in [0, pi].
Box5 reduced_domain();

// Per-parameter bounds on how fast the hull area can change.
struct LipschitzConstants {
    double c1 = 0.306;
    double c2 = 0.443;
    double c3 = 0.392;
    double c4 = 0.449;
    double c5 = 0.115;  // per radian

    std::array<double, 5> as_array() const { return {c1, c2, c3, c4, c5}; }
};

struct CheckLine {
    std::string name;
    double value = 0.0;
    double bound = 0.0;   // value must clear this bound
    double margin = 0.0;  // positive when the check passes with room
    bool pass = false;
};

struct LemmaReport {
    std::vector<CheckLine> checks;
    bool all_pass = true;

    void add(std::string name, double value, double bound, double margin, double eps_fp);
    std::string to_text() const;
    std::string to_kv(const std::string& prefix = {}) const;
};

// Hull area of the circle polygon and the rectangle centered at (x1, y1).
double circle_rect_area(double x1, double y1, const ShapeSpec& spec = {});

// Lower bound on the hull area once the segment center is `dist` away from
// the circle center: half the circle-to-segment trapezoid plus half the
// circle polygon.
double trapezoid_bound(double dist, const ShapeSpec& spec = {});

// Lower bound on the hull area once the configuration's vertical extent
// reaches `extent`: the rectangle plus the triangles it spans.
double y_extent_bound(double extent, const ShapeSpec& spec = {});

// Verifies the domain-reduction inequalities at the given threshold: the
// circle+rectangle areas at the domain edge, the trapezoid bound at the
// segment-distance edge, the vertical-extent bound, and the horizontal
// extent decomposition.
LemmaReport check_domain_reduction(const ShapeSpec& spec = {},
                                   double eps_fp = kDefaultEpsFp,
                                   double threshold = 0.1);

// Diameter of circle polygon plus rectangle, maximized over the corners of
// the reduced (x1, y1) range. Throws if the bound 0.45976 or the rectangle
// diagonal bound 0.37007 fails.
double circle_rect_diameter_bound(const ShapeSpec& spec = {});
LemmaReport check_diameter_claim(const ShapeSpec& spec = {},
                                 double eps_fp = kDefaultEpsFp);

// The five derivation inequalities behind the constants.
LemmaReport check_lipschitz_derivations(const ShapeSpec& spec = {},
                                        double eps_fp = kDefaultEpsFp);

// Returns the constants after asserting their derivations; throws on any
// violated inequality.
LipschitzConstants lipschitz_constants(const ShapeSpec& spec = {});

struct ValidationReport {
    int samples = 0;
    double step = 0.0;
    std::uint64_t seed = 0;
    std::array<double, 5> max_slope{};
    LipschitzConstants constants;
    bool pass = false;

    std::string to_text() const;
    std::string to_kv(const std::string& prefix = {}) const;
};

// Empirical cross-check: sampled directional slopes of the objective inside
// the reduced domain must stay below the constants.
ValidationReport validate_lipschitz(int samples, double step, std::uint64_t seed,
                                    const ShapeSpec& spec = {});

}  // namespace cover
