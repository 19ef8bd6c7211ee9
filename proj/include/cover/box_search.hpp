#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cover/bounds.hpp"
#include "cover/box5.hpp"
#include "cover/configuration.hpp"

namespace cover {

// Exact retired-volume accounting. Every processed box is a dyadic fraction
// 2^-depth of the initial domain, so the covered fraction is tracked as a
// wide binary fraction: addition is exact, commutative, and associative,
// which makes the total independent of traversal order and worker count.
class VolumeLedger {
public:
    static constexpr int kLimbs = 5;  // 320 fractional bits

    void add_box(std::uint32_t depth);
    void merge(const VolumeLedger& other);

    bool complete() const;      // exactly the whole domain
    double fraction() const;    // in [0, 1]
    bool empty() const;

    std::uint64_t integer_part() const { return ones_; }
    const std::array<std::uint64_t, kLimbs>& limbs() const { return limbs_; }
    static VolumeLedger from_raw(std::uint64_t ones,
                                 const std::array<std::uint64_t, kLimbs>& limbs);

private:
    std::uint64_t ones_ = 0;
    // limbs_[0] holds the most significant 64 fractional bits.
    std::array<std::uint64_t, kLimbs> limbs_{};
};

struct PendingBox {
    Box5 box;
    std::uint32_t depth = 0;
};

struct ProgressRow {
    double percent = 0.0;
    std::uint64_t iterations = 0;
    double best_value = std::numeric_limits<double>::infinity();
    double elapsed_s = 0.0;
};

struct SearchWitness {
    Box5 box;
    double value = 0.0;   // objective at the box center
    double margin = 0.0;  // certified margin of the box
    std::string reason;
};

struct SearchResult {
    bool proven = false;
    double threshold = 0.0;
    std::uint64_t iterations = 0;
    double best_value = std::numeric_limits<double>::infinity();
    ConfigParams best_params;
    double verified_volume_fraction = 0.0;
    double wall_time = 0.0;
    std::optional<SearchWitness> witness;
    std::vector<Box5> retired_sample;  // reservoir, when requested
};

struct SearchOptions {
    int workers = 1;
    std::uint64_t max_iterations = 0;  // 0 = unlimited
    double min_box_width = 1e-9;
    double eps_fp = kDefaultEpsFp;
    std::uint64_t progress_every = 0;  // 0 = no progress rows
    std::function<void(const ProgressRow&)> progress_sink;
    std::string checkpoint_path;        // empty = no periodic checkpoints
    std::uint64_t checkpoint_every = 0; // iterations between checkpoints
    std::size_t retired_sample_size = 0;
    std::uint64_t sample_seed = 1;
};

// Resumable engine state: everything needed to continue a run.
struct EngineState {
    Box5 domain;
    double threshold = 0.0;
    LipschitzConstants constants;
    double eps_fp = kDefaultEpsFp;
    double min_box_width = 1e-9;

    std::vector<PendingBox> pending;
    std::uint64_t iterations = 0;
    VolumeLedger retired;
    double best_value = std::numeric_limits<double>::infinity();
    std::array<double, 5> best_params{};
    double elapsed_seconds = 0.0;
};

EngineState make_engine_state(const Box5& domain, double threshold,
                              const LipschitzConstants& constants,
                              double eps_fp = kDefaultEpsFp,
                              double min_box_width = 1e-9);

// One objective instance per worker; each instance may keep scratch state.
using Objective5 = std::function<double(const std::array<double, 5>&)>;
using ObjectiveFactory = std::function<Objective5()>;

ObjectiveFactory config_objective_factory(const ShapeSpec& spec = {});

// Certified margin of a box: objective at the center minus the Lipschitz
// cone over the half-widths. Non-negative margin above the threshold proves
// the objective exceeds the threshold everywhere in the box.
double box_margin(const Box5& box, const LipschitzConstants& constants,
                  const Objective5& objective);
double box_margin(const Box5& box, const LipschitzConstants& constants,
                  const ShapeSpec& spec = {});

// Bisects along the widest side (lowest index on ties); the halves share a
// face and partition the box exactly.
std::pair<Box5, Box5> split_box(const Box5& box);

// Processes pending boxes until none remain (proven) or a limit is hit.
SearchResult run_search(EngineState& state, const ObjectiveFactory& factory,
                        const SearchOptions& opts = {});
SearchResult run_search(const Box5& domain, double threshold,
                        const LipschitzConstants& constants,
                        const SearchOptions& opts = {},
                        const ShapeSpec& spec = {});

void checkpoint_save(const EngineState& state, const std::string& path);
EngineState checkpoint_load(const std::string& path);

ProgressRow progress_stats(const EngineState& state);

}  // namespace cover
