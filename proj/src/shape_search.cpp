#include "cover/shape_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include "cover/configuration.hpp"

namespace cover {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(std::span<const double>)>& fn,
    std::span<const double> start, std::span<const double> steps,
    const NelderMeadOptions& opts) {
    const std::size_t n = start.size();
    if (n == 0) throw std::domain_error("nelder_mead: empty start point");
    if (steps.size() != n)
        throw std::domain_error("nelder_mead: steps size mismatch");

    constexpr double kReflect = 1.0;
    constexpr double kExpand = 2.0;
    constexpr double kContract = 0.5;
    constexpr double kShrink = 0.5;

    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return fn(x);
    };

    // simplex of n+1 vertices
    std::vector<std::vector<double>> simplex(n + 1,
                                             std::vector<double>(start.begin(),
                                                                 start.end()));
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
    for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), candidate(n), second(n);

    while (evals < opts.max_evals) {
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) {
                             return values[a] < values[b];
                         });
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t next_worst = order[n - 1];

        if (values[worst] - values[best] < opts.f_tol) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (std::size_t j = 0; j < n; ++j) centroid[j] /= static_cast<double>(n);

        for (std::size_t j = 0; j < n; ++j)
            candidate[j] = centroid[j] + kReflect * (centroid[j] - simplex[worst][j]);
        const double reflected = eval(candidate);

        if (reflected < values[best]) {
            for (std::size_t j = 0; j < n; ++j)
                second[j] = centroid[j] + kExpand * (candidate[j] - centroid[j]);
            const double expanded = eval(second);
            if (expanded < reflected) {
                simplex[worst] = second;
                values[worst] = expanded;
            } else {
                simplex[worst] = candidate;
                values[worst] = reflected;
            }
        } else if (reflected < values[next_worst]) {
            simplex[worst] = candidate;
            values[worst] = reflected;
        } else {
            const bool outside = reflected < values[worst];
            const auto& base = outside ? candidate : simplex[worst];
            for (std::size_t j = 0; j < n; ++j)
                second[j] = centroid[j] + kContract * (base[j] - centroid[j]);
            const double contracted = eval(second);
            if (contracted < std::min(reflected, values[worst])) {
                simplex[worst] = second;
                values[worst] = contracted;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[best][j] +
                                        kShrink * (simplex[i][j] - simplex[best][j]);
                    values[i] = eval(simplex[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (values[i] < values[best]) best = i;
    return {simplex[best], values[best], evals};
}

Polygon normalize_unit_perimeter(const Polygon& poly) {
    const Polygon hull = convex_hull(poly.vertices);
    const double perimeter = polygon_perimeter(hull);
    if (!(perimeter > 1e-12))
        throw std::domain_error("normalize_unit_perimeter: zero-perimeter input");
    Point centroid{0.0, 0.0};
    for (const Point& v : hull.vertices) centroid = centroid + v;
    centroid = (1.0 / static_cast<double>(hull.vertices.size())) * centroid;
    Polygon out;
    out.vertices.reserve(hull.vertices.size());
    const double scale = 1.0 / perimeter;
    for (const Point& v : hull.vertices)
        out.vertices.push_back(scale * (v - centroid));
    return out;
}

namespace {

// Hull-area objective over the motion parameters of the moving shapes.
// shapes[0] is prepared once; moving vertices are transformed in place.
class MotionObjective {
public:
    explicit MotionObjective(std::span<const Polygon> shapes)
        : fixed_(shapes[0].vertices) {
        for (std::size_t s = 1; s < shapes.size(); ++s)
            moving_.push_back(shapes[s].vertices);
        std::size_t total = 0;
        for (const auto& m : moving_) total += m.size();
        buffer_.resize(total);
    }

    std::size_t moving_count() const { return moving_.size(); }
    std::size_t dims() const { return 3 * moving_.size(); }

    double operator()(std::span<const double> motion) {
        std::size_t k = 0;
        for (std::size_t s = 0; s < moving_.size(); ++s) {
            const double tx = motion[3 * s];
            const double ty = motion[3 * s + 1];
            const double c = std::cos(motion[3 * s + 2]);
            const double sn = std::sin(motion[3 * s + 2]);
            for (const Point& p : moving_[s])
                buffer_[k++] = {c * p.x - sn * p.y + tx, sn * p.x + c * p.y + ty};
        }
        return fixed_.area_with(buffer_);
    }

private:
    MergedHullArea fixed_;
    std::vector<std::vector<Point>> moving_;
    std::vector<Point> buffer_;
};

std::vector<double> flatten(const std::vector<MotionParams>& motions) {
    std::vector<double> x;
    x.reserve(3 * motions.size());
    for (const auto& m : motions) {
        x.push_back(m.tx);
        x.push_back(m.ty);
        x.push_back(m.angle);
    }
    return x;
}

std::vector<MotionParams> unflatten(std::span<const double> x) {
    std::vector<MotionParams> motions(x.size() / 3);
    for (std::size_t s = 0; s < motions.size(); ++s)
        motions[s] = {x[3 * s], x[3 * s + 1], x[3 * s + 2]};
    return motions;
}

}  // namespace

MotionSearchResult min_over_motions(std::span<const Polygon> shapes,
                                    const MotionSearchOptions& opts) {
    if (shapes.size() < 2 || shapes.size() > 3)
        throw std::domain_error("min_over_motions: need 2 or 3 shapes");
    if (opts.starts < 1)
        throw std::domain_error("min_over_motions: need starts >= 1");

    const std::size_t moving = shapes.size() - 1;
    const std::size_t dims = 3 * moving;

    // Start list: overlaid centroids first, then the warm starts, then
    // seeded random placements.
    std::vector<std::vector<double>> starts;
    starts.emplace_back(dims, 0.0);
    for (const auto& warm : opts.warm_starts)
        if (warm.size() == moving) starts.push_back(flatten(warm));
    std::mt19937_64 rng(opts.seed);
    while (starts.size() < static_cast<std::size_t>(opts.starts) +
                               opts.warm_starts.size() + 1) {
        std::vector<double> x(dims);
        for (std::size_t s = 0; s < moving; ++s) {
            x[3 * s] = uniform(rng, -0.25, 0.25);
            x[3 * s + 1] = uniform(rng, -0.25, 0.25);
            x[3 * s + 2] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        }
        starts.push_back(std::move(x));
    }

    NelderMeadOptions nm;
    nm.max_evals = opts.max_evals_per_start;

    std::vector<double> step(dims);
    for (std::size_t s = 0; s < moving; ++s) {
        step[3 * s] = 0.05;
        step[3 * s + 1] = 0.05;
        step[3 * s + 2] = 0.3;
    }

    std::vector<NelderMeadResult> results(starts.size());
    auto run_range = [&](std::size_t begin, std::size_t end) {
        MotionObjective objective(shapes);
        const auto fn = [&objective](std::span<const double> x) {
            return objective(x);
        };
        for (std::size_t i = begin; i < end; ++i)
            results[i] = nelder_mead(fn, starts[i], step, nm);
    };

    const int threads = std::max(1, opts.threads);
    if (threads == 1 || starts.size() < 2) {
        run_range(0, starts.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk =
            (starts.size() + static_cast<std::size_t>(threads) - 1) /
            static_cast<std::size_t>(threads);
        for (int t = 0; t < threads; ++t) {
            const std::size_t b = static_cast<std::size_t>(t) * chunk;
            const std::size_t e = std::min(starts.size(), b + chunk);
            if (b >= e) break;
            pool.emplace_back(run_range, b, e);
        }
        for (auto& t : pool) t.join();
    }

    // Deterministic merge: lowest value, earliest start on ties.
    std::size_t best = 0;
    for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].value < results[best].value) best = i;

    return {unflatten(results[best].x), results[best].value};
}

namespace {

struct OuterObjective {
    const ShapeProblem* problem;
    const ShapeSearchOptions* opts;
    std::vector<std::vector<MotionParams>> warm;  // incumbent motions

    // Assembles the shape list from raw coordinates; returns false when a
    // shape degenerates (zero perimeter).
    bool assemble(std::span<const double> coords,
                  std::vector<Polygon>& out) const {
        out = problem->fixed_shapes;
        std::size_t k = 0;
        for (int count : problem->vertex_counts) {
            Polygon raw;
            raw.vertices.reserve(static_cast<std::size_t>(count));
            for (int i = 0; i < count; ++i) {
                raw.vertices.push_back({coords[k], coords[k + 1]});
                k += 2;
            }
            try {
                out.push_back(normalize_unit_perimeter(raw));
            } catch (const std::domain_error&) {
                return false;
            }
        }
        return true;
    }

    MotionSearchResult evaluate(std::span<const double> coords,
                                int starts) const {
        std::vector<Polygon> shapes;
        if (!assemble(coords, shapes))
            return {{}, -std::numeric_limits<double>::infinity()};
        MotionSearchOptions inner;
        inner.starts = starts;
        inner.seed = opts->seed;
        inner.max_evals_per_start = opts->inner_evals_per_start;
        inner.threads = opts->threads;
        inner.warm_starts = warm;
        return min_over_motions(shapes, inner);
    }
};

}  // namespace

ShapeSearchResult max_over_shapes(const ShapeProblem& problem,
                                  const ShapeSearchOptions& opts) {
    if (problem.vertex_counts.empty())
        throw std::domain_error("max_over_shapes: nothing to optimize");
    for (int n : problem.vertex_counts)
        if (n < 2) throw std::domain_error("max_over_shapes: counts must be >= 2");
    if (problem.fixed_shapes.size() + problem.vertex_counts.size() < 2 ||
        problem.fixed_shapes.size() + problem.vertex_counts.size() > 3)
        throw std::domain_error("max_over_shapes: need 2 or 3 shapes in total");

    const auto t0 = std::chrono::steady_clock::now();

    // Initial coordinates: supplied seeds or regular n-gons (a 2-gon is a
    // horizontal unit-perimeter segment).
    std::vector<double> coords;
    for (std::size_t s = 0; s < problem.vertex_counts.size(); ++s) {
        const int n = problem.vertex_counts[s];
        Polygon init;
        if (s < problem.initial_shapes.size()) {
            init = problem.initial_shapes[s];
            if (static_cast<int>(init.vertices.size()) > n)
                throw std::domain_error(
                    "max_over_shapes: initial shape has too many vertices");
        } else if (n == 2) {
            init.vertices = {{-0.25, 0.0}, {0.25, 0.0}};
        } else {
            init = regular_polygon(n, 1.0, 0.0);
        }
        // Pad with duplicated last vertex up to the requested count.
        while (static_cast<int>(init.vertices.size()) < n)
            init.vertices.push_back(init.vertices.back());
        for (const Point& p : init.vertices) {
            coords.push_back(p.x);
            coords.push_back(p.y);
        }
    }

    OuterObjective outer{&problem, &opts, {}};

    ShapeSearchResult result;
    std::uint64_t evals = 0;

    auto evaluate = [&](std::span<const double> c, int starts) {
        ++evals;
        MotionSearchResult r = outer.evaluate(c, starts);
        result.eval_log.push_back(r.area);
        return r;
    };

    MotionSearchResult current = evaluate(coords, opts.inner_starts);
    if (std::isfinite(current.area)) outer.warm = {current.motions};

    double mesh = opts.mesh_initial;
    std::vector<double> probe(coords.size());
    while (mesh >= opts.mesh_min && evals < opts.max_outer_evals) {
        bool improved = false;
        for (std::size_t j = 0; j < coords.size() && evals < opts.max_outer_evals;
             ++j) {
            for (double direction : {+1.0, -1.0}) {
                probe.assign(coords.begin(), coords.end());
                probe[j] += direction * mesh;
                MotionSearchResult r = evaluate(probe, opts.inner_starts);
                if (r.area > current.area + 1e-12) {
                    coords = probe;
                    current = r;
                    outer.warm = {r.motions};
                    improved = true;
                    break;
                }
            }
        }
        if (!improved) mesh *= 0.5;
    }

    // Final polish with a larger multistart budget; the inner minimum is an
    // upper bound obtained by sampling, so keep the smaller value.
    MotionSearchResult final_eval = evaluate(coords, opts.final_starts);
    if (final_eval.area <= current.area) current = final_eval;

    outer.assemble(coords, result.shapes);
    result.shapes.erase(result.shapes.begin(),
                        result.shapes.begin() +
                            static_cast<std::ptrdiff_t>(problem.fixed_shapes.size()));
    result.motions = current.motions;
    result.value = current.area;
    result.outer_evals = evals;
    result.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return result;
}

ShapeSearchResult fixed_two_search(int ngon, const ShapeSearchOptions& opts) {
    if (ngon < 3) throw std::domain_error("fixed_two_search: need ngon >= 3");
    ShapeProblem problem;
    problem.fixed_shapes.push_back(*circle_polygon(ShapeSpec{}));
    problem.fixed_shapes.push_back(Polygon{{{-0.25, 0.0}, {0.25, 0.0}}});
    problem.vertex_counts = {ngon};
    return max_over_shapes(problem, opts);
}

ShapeSearchResult fixed_two_search(int ngon, const Polygon& initial,
                                   const ShapeSearchOptions& opts) {
    if (ngon < 3) throw std::domain_error("fixed_two_search: need ngon >= 3");
    ShapeProblem problem;
    problem.fixed_shapes.push_back(*circle_polygon(ShapeSpec{}));
    problem.fixed_shapes.push_back(Polygon{{{-0.25, 0.0}, {0.25, 0.0}}});
    problem.vertex_counts = {ngon};
    problem.initial_shapes = {initial};
    return max_over_shapes(problem, opts);
}

}  // namespace cover
