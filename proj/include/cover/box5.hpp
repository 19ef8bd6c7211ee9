#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace cover {

// Axis-aligned closed box in parameter space, the unit of work for the
// certificate search.
struct Box5 {
    std::array<double, 5> lo{};
    std::array<double, 5> hi{};

    std::array<double, 5> center() const {
        std::array<double, 5> c{};
        for (std::size_t i = 0; i < 5; ++i) c[i] = 0.5 * (lo[i] + hi[i]);
        return c;
    }

    std::array<double, 5> half_width() const {
        std::array<double, 5> d{};
        for (std::size_t i = 0; i < 5; ++i) d[i] = 0.5 * (hi[i] - lo[i]);
        return d;
    }

    double side(std::size_t i) const { return hi[i] - lo[i]; }

    // Lowest index wins ties, so splitting is deterministic.
    std::size_t widest_dim() const {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 5; ++i)
            if (side(i) > side(best)) best = i;
        return best;
    }

    double max_side() const { return side(widest_dim()); }

    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < 5; ++i) v *= side(i);
        return v;
    }

    bool valid() const {
        for (std::size_t i = 0; i < 5; ++i)
            if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] > hi[i])
                return false;
        return true;
    }
};

}  // namespace cover
