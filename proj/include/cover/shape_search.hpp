#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cover/geometry.hpp"

namespace cover {

// Rigid motion of one moving polygon: rotate by `angle`, then translate.
struct MotionParams {
    double tx = 0.0;
    double ty = 0.0;
    double angle = 0.0;
};

struct NelderMeadOptions {
    int max_evals = 2000;
    double f_tol = 1e-12;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;
};

// Derivative-free simplex descent; deterministic for a given start.
NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& fn,
    std::span<const double> start, std::span<const double> steps,
    const NelderMeadOptions& opts = {});

// Convex hull of the input, vertex centroid moved to the origin, scaled to
// perimeter 1.
Polygon normalize_unit_perimeter(const Polygon& poly);

struct MotionSearchOptions {
    int starts = 20;
    std::uint64_t seed = 1;
    int max_evals_per_start = 1500;
    int threads = 1;
    // Extra deterministic starts, e.g. the incumbent from an outer loop.
    std::vector<std::vector<MotionParams>> warm_starts;
};

struct MotionSearchResult {
    std::vector<MotionParams> motions;  // one per moving shape
    double area = 0.0;
};

// Minimal hull area over rigid motions of shapes[1..]; shapes[0] stays put.
MotionSearchResult min_over_motions(std::span<const Polygon> shapes,
                                    const MotionSearchOptions& opts = {});

// Maximin experiment: which shapes (by vertex count) are optimized, and
// which are given and kept verbatim. The first shape overall is the one
// held in place during the inner minimization.
struct ShapeProblem {
    std::vector<int> vertex_counts;
    std::vector<Polygon> fixed_shapes;
    std::vector<Polygon> initial_shapes;  // optional seeds; default regular n-gons
};

struct ShapeSearchOptions {
    std::uint64_t seed = 1;
    double mesh_initial = 0.02;
    double mesh_min = 1e-4;
    int inner_starts = 8;
    int final_starts = 48;
    int inner_evals_per_start = 1200;
    std::uint64_t max_outer_evals = 4000;
    int threads = 1;
};

struct ShapeSearchResult {
    std::vector<Polygon> shapes;  // optimized shapes, unit perimeter
    std::vector<MotionParams> motions;
    double value = 0.0;
    std::uint64_t outer_evals = 0;
    std::vector<double> eval_log;  // objective of every outer evaluation
    double wall_time = 0.0;
};

// Pattern-search ascent over vertex coordinates with the inner motion
// minimum as the objective.
ShapeSearchResult max_over_shapes(const ShapeProblem& problem,
                                  const ShapeSearchOptions& opts = {});

// Circle (regular 500-gon) and half-unit segment held as given; only the
// n-gon's vertices are optimized.
ShapeSearchResult fixed_two_search(int ngon, const ShapeSearchOptions& opts = {});
ShapeSearchResult fixed_two_search(int ngon, const Polygon& initial,
                                   const ShapeSearchOptions& opts = {});

}  // namespace cover
