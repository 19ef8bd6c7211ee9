#include "cover/box_search.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace cover {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void atomic_min(std::atomic<double>& target, double value) {
    double cur = target.load(std::memory_order_relaxed);
    while (value < cur &&
           !target.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
    }
}

void atomic_add(std::atomic<double>& target, double value) {
    double cur = target.load(std::memory_order_relaxed);
    while (!target.compare_exchange_weak(cur, cur + value,
                                         std::memory_order_relaxed)) {
    }
}

// Uniform reservoir over retired boxes, for soundness spot-checks.
class Reservoir {
public:
    Reservoir(std::size_t capacity, std::uint64_t seed)
        : capacity_(capacity), rng_(seed) {}

    void offer(const Box5& box) {
        if (capacity_ == 0) return;
        std::lock_guard lock(mutex_);
        ++seen_;
        if (sample_.size() < capacity_) {
            sample_.push_back(box);
        } else {
            const std::uint64_t j = rng_() % seen_;
            if (j < capacity_) sample_[static_cast<std::size_t>(j)] = box;
        }
    }

    std::vector<Box5> take() { return std::move(sample_); }
    bool enabled() const { return capacity_ != 0; }

private:
    std::size_t capacity_;
    std::mutex mutex_;
    std::uint64_t seen_ = 0;
    std::mt19937_64 rng_;
    std::vector<Box5> sample_;
};

}  // namespace

void VolumeLedger::add_box(std::uint32_t depth) {
    if (depth == 0) {
        ++ones_;
        return;
    }
    const std::uint32_t bit = depth - 1;
    if (bit >= 64u * kLimbs)
        throw std::logic_error("VolumeLedger: box depth exceeds precision");
    std::size_t limb = bit / 64;
    std::uint64_t add = 1ull << (63 - bit % 64);
    for (;;) {
        const std::uint64_t before = limbs_[limb];
        limbs_[limb] = before + add;
        if (limbs_[limb] >= before) return;  // no wrap, done
        if (limb == 0) {
            ++ones_;
            return;
        }
        --limb;
        add = 1;  // propagate the carry
    }
}

void VolumeLedger::merge(const VolumeLedger& other) {
    std::uint64_t carry = 0;
    for (int i = kLimbs - 1; i >= 0; --i) {
        const std::uint64_t a = limbs_[static_cast<std::size_t>(i)];
        const std::uint64_t b = other.limbs_[static_cast<std::size_t>(i)];
        const std::uint64_t sum1 = a + b;
        const std::uint64_t c1 = sum1 < a ? 1u : 0u;
        const std::uint64_t sum2 = sum1 + carry;
        const std::uint64_t c2 = sum2 < sum1 ? 1u : 0u;
        limbs_[static_cast<std::size_t>(i)] = sum2;
        carry = c1 + c2;
    }
    ones_ += other.ones_ + carry;
}

bool VolumeLedger::complete() const {
    if (ones_ != 1) return false;
    for (auto limb : limbs_)
        if (limb != 0) return false;
    return true;
}

bool VolumeLedger::empty() const {
    if (ones_ != 0) return false;
    for (auto limb : limbs_)
        if (limb != 0) return false;
    return true;
}

double VolumeLedger::fraction() const {
    double f = 0.0;
    for (int i = kLimbs - 1; i >= 0; --i)
        f += std::ldexp(static_cast<double>(limbs_[static_cast<std::size_t>(i)]),
                        -64 * (i + 1));
    return f + static_cast<double>(ones_);
}

VolumeLedger VolumeLedger::from_raw(std::uint64_t ones,
                                    const std::array<std::uint64_t, kLimbs>& limbs) {
    VolumeLedger ledger;
    ledger.ones_ = ones;
    ledger.limbs_ = limbs;
    return ledger;
}

std::pair<Box5, Box5> split_box(const Box5& box) {
    if (!(box.max_side() > 0.0))
        throw std::domain_error("split_box: all sides are zero");
    const std::size_t d = box.widest_dim();
    const double mid = 0.5 * (box.lo[d] + box.hi[d]);
    Box5 a = box;
    Box5 b = box;
    a.hi[d] = mid;
    b.lo[d] = mid;
    return {a, b};
}

double box_margin(const Box5& box, const LipschitzConstants& constants,
                  const Objective5& objective) {
    const double value = objective(box.center());
    const auto c = constants.as_array();
    const auto d = box.half_width();
    double cone = 0.0;
    for (std::size_t i = 0; i < 5; ++i) cone += c[i] * d[i];
    return value - cone;
}

double box_margin(const Box5& box, const LipschitzConstants& constants,
                  const ShapeSpec& spec) {
    ConfigObjective objective(spec);
    const Objective5 fn = [&objective](const std::array<double, 5>& z) {
        return objective(ConfigParams::from_array(z));
    };
    return box_margin(box, constants, fn);
}

ObjectiveFactory config_objective_factory(const ShapeSpec& spec) {
    return [spec]() -> Objective5 {
        return [obj = ConfigObjective(spec)](const std::array<double, 5>& z) mutable {
            return obj(ConfigParams::from_array(z));
        };
    };
}

EngineState make_engine_state(const Box5& domain, double threshold,
                              const LipschitzConstants& constants, double eps_fp,
                              double min_box_width) {
    if (!(threshold > 0.0))
        throw std::domain_error("run_search: threshold must be positive");
    if (!domain.valid()) throw std::domain_error("run_search: invalid domain box");
    if (!(eps_fp >= 0.0)) throw std::domain_error("run_search: negative eps_fp");
    if (!(min_box_width > 0.0))
        throw std::domain_error("run_search: min_box_width must be positive");
    EngineState state;
    state.domain = domain;
    state.threshold = threshold;
    state.constants = constants;
    state.eps_fp = eps_fp;
    state.min_box_width = min_box_width;
    state.pending.push_back({domain, 0});
    return state;
}

namespace {

struct SharedSearch {
    std::mutex mutex;
    std::condition_variable cv;
    std::vector<PendingBox>* pool = nullptr;  // state.pending
    std::atomic<std::size_t> pool_size{0};
    int workers = 1;
    int idle = 0;
    bool complete = false;  // pool drained with every worker idle
    bool stop_requested = false;
    std::atomic<bool> stop_flag{false};

    std::atomic<std::uint64_t> iterations{0};
    std::uint64_t epoch_target = 0;

    // Display-only running totals; exact values live in EngineState.
    std::atomic<double> best_display{std::numeric_limits<double>::infinity()};
    std::atomic<double> volume_display{0.0};

    bool failed = false;
    std::optional<SearchWitness> witness;

    void request_stop() {
        {
            std::lock_guard lock(mutex);
            stop_requested = true;
        }
        stop_flag.store(true, std::memory_order_relaxed);
        cv.notify_all();
    }
};

struct WorkerContext {
    const EngineState* cfg;
    const SearchOptions* opts;
    SharedSearch* shared;
    Reservoir* reservoir;
    Clock::time_point t0;
    double elapsed_offset = 0.0;
    double domain_volume = 1.0;
    std::mutex* result_mutex;
    // merged under result_mutex at worker exit
    VolumeLedger* retired_total;
    double* best_total;
    std::array<double, 5>* best_params_total;
};

void worker_main(WorkerContext ctx, Objective5 objective) {
    SharedSearch& sh = *ctx.shared;
    const SearchOptions& opts = *ctx.opts;
    const auto consts = ctx.cfg->constants.as_array();
    const double retire_at = ctx.cfg->threshold + ctx.cfg->eps_fp;
    const double min_width = ctx.cfg->min_box_width;

    std::vector<PendingBox> local;
    VolumeLedger retired;
    double best = std::numeric_limits<double>::infinity();
    std::array<double, 5> best_params{};
    double volume_partial = 0.0;
    int volume_flush = 0;

    auto flush_local = [&] {
        std::lock_guard lock(sh.mutex);
        sh.pool->insert(sh.pool->end(), local.begin(), local.end());
        sh.pool_size.store(sh.pool->size(), std::memory_order_relaxed);
        local.clear();
        sh.cv.notify_all();
    };
    auto merge_results = [&] {
        if (volume_partial != 0.0) atomic_add(sh.volume_display, volume_partial);
        std::lock_guard lock(*ctx.result_mutex);
        ctx.retired_total->merge(retired);
        if (best < *ctx.best_total) {
            *ctx.best_total = best;
            *ctx.best_params_total = best_params;
        }
    };

    for (;;) {
        if (sh.stop_flag.load(std::memory_order_relaxed)) {
            flush_local();
            merge_results();
            return;
        }

        PendingBox item;
        if (!local.empty()) {
            item = local.back();
            local.pop_back();
        } else {
            std::unique_lock lock(sh.mutex);
            for (;;) {
                if (sh.stop_requested || sh.complete) {
                    lock.unlock();
                    merge_results();
                    return;
                }
                if (!sh.pool->empty()) break;
                ++sh.idle;
                if (sh.idle == sh.workers) {
                    sh.complete = true;
                    --sh.idle;
                    sh.cv.notify_all();
                    lock.unlock();
                    merge_results();
                    return;
                }
                sh.cv.wait(lock);
                --sh.idle;
            }
            item = sh.pool->back();
            sh.pool->pop_back();
            sh.pool_size.store(sh.pool->size(), std::memory_order_relaxed);
        }

        const auto center = item.box.center();
        const double value = objective(center);
        if (value < best) {
            best = value;
            best_params = center;
            atomic_min(sh.best_display, value);
        }
        const auto half = item.box.half_width();
        double cone = 0.0;
        for (std::size_t i = 0; i < 5; ++i) cone += consts[i] * half[i];
        const double margin = value - cone;

        const std::uint64_t it =
            sh.iterations.fetch_add(1, std::memory_order_relaxed) + 1;

        if (margin >= retire_at) {
            retired.add_box(item.depth);
            volume_partial += item.box.volume();
            if (++volume_flush >= 1024) {
                atomic_add(sh.volume_display, volume_partial);
                volume_partial = 0.0;
                volume_flush = 0;
            }
            if (ctx.reservoir) ctx.reservoir->offer(item.box);
        } else if (item.box.max_side() < min_width) {
            {
                std::lock_guard lock(sh.mutex);
                if (!sh.failed) {
                    sh.failed = true;
                    sh.witness = SearchWitness{
                        item.box, value, margin,
                        "box width floor reached with margin below threshold"};
                }
            }
            local.push_back(item);  // keep the witness box pending
            sh.request_stop();
            flush_local();
            merge_results();
            return;
        } else {
            const auto [a, b] = split_box(item.box);
            local.push_back({b, item.depth + 1});
            local.push_back({a, item.depth + 1});
        }

        if (opts.progress_every != 0 && opts.progress_sink &&
            it % opts.progress_every == 0) {
            ProgressRow row;
            row.percent =
                100.0 * sh.volume_display.load(std::memory_order_relaxed) /
                ctx.domain_volume;
            row.iterations = it;
            row.best_value = sh.best_display.load(std::memory_order_relaxed);
            row.elapsed_s = ctx.elapsed_offset + seconds_since(ctx.t0);
            std::lock_guard lock(sh.mutex);
            opts.progress_sink(row);
        }

        if (it >= sh.epoch_target) {
            sh.request_stop();
            flush_local();
            merge_results();
            return;
        }

        if (sh.workers > 1 && local.size() > 1 &&
            sh.pool_size.load(std::memory_order_relaxed) == 0) {
            // Donate the older (larger) half of the local stack.
            const std::size_t half_count = local.size() / 2;
            std::lock_guard lock(sh.mutex);
            sh.pool->insert(sh.pool->end(), local.begin(),
                            local.begin() + static_cast<std::ptrdiff_t>(half_count));
            local.erase(local.begin(),
                        local.begin() + static_cast<std::ptrdiff_t>(half_count));
            sh.pool_size.store(sh.pool->size(), std::memory_order_relaxed);
            sh.cv.notify_all();
        }
    }
}

}  // namespace

SearchResult run_search(EngineState& state, const ObjectiveFactory& factory,
                        const SearchOptions& opts) {
    if (!(state.threshold > 0.0))
        throw std::domain_error("run_search: threshold must be positive");
    if (!(state.min_box_width > 0.0))
        throw std::domain_error("run_search: min_box_width must be positive");
    if (opts.workers < 1) throw std::domain_error("run_search: need workers >= 1");

    const auto t0 = Clock::now();
    const double elapsed_offset = state.elapsed_seconds;

    Reservoir reservoir(opts.retired_sample_size, opts.sample_seed);
    bool failed = false;
    std::optional<SearchWitness> witness;

    std::uint64_t next_checkpoint = std::numeric_limits<std::uint64_t>::max();
    const bool checkpointing =
        opts.checkpoint_every != 0 && !opts.checkpoint_path.empty();
    if (checkpointing)
        next_checkpoint =
            (state.iterations / opts.checkpoint_every + 1) * opts.checkpoint_every;

    std::mutex result_mutex;

    while (!state.pending.empty() && !failed) {
        if (opts.max_iterations != 0 && state.iterations >= opts.max_iterations)
            break;

        std::uint64_t target = std::numeric_limits<std::uint64_t>::max();
        if (opts.max_iterations != 0) target = opts.max_iterations;
        target = std::min(target, next_checkpoint);

        SharedSearch shared;
        shared.pool = &state.pending;
        shared.pool_size.store(state.pending.size(), std::memory_order_relaxed);
        shared.workers = opts.workers;
        shared.iterations.store(state.iterations, std::memory_order_relaxed);
        shared.epoch_target = target;
        shared.best_display.store(state.best_value, std::memory_order_relaxed);
        shared.volume_display.store(state.retired.fraction() *
                                        state.domain.volume(),
                                    std::memory_order_relaxed);

        WorkerContext ctx;
        ctx.cfg = &state;
        ctx.opts = &opts;
        ctx.shared = &shared;
        ctx.reservoir = reservoir.enabled() ? &reservoir : nullptr;
        ctx.t0 = t0;
        ctx.elapsed_offset = elapsed_offset;
        ctx.domain_volume = state.domain.volume();
        ctx.result_mutex = &result_mutex;
        ctx.retired_total = &state.retired;
        ctx.best_total = &state.best_value;
        ctx.best_params_total = &state.best_params;

        if (opts.workers == 1) {
            worker_main(ctx, factory());
        } else {
            std::vector<std::thread> threads;
            threads.reserve(static_cast<std::size_t>(opts.workers));
            for (int w = 0; w < opts.workers; ++w)
                threads.emplace_back(worker_main, ctx, factory());
            for (auto& t : threads) t.join();
        }

        state.iterations = shared.iterations.load(std::memory_order_relaxed);
        if (shared.failed) {
            failed = true;
            witness = shared.witness;
        }

        state.elapsed_seconds = elapsed_offset + seconds_since(t0);
        if (checkpointing && state.iterations >= next_checkpoint) {
            checkpoint_save(state, opts.checkpoint_path);
            while (next_checkpoint <= state.iterations)
                next_checkpoint += opts.checkpoint_every;
        }
    }

    state.elapsed_seconds = elapsed_offset + seconds_since(t0);

    SearchResult result;
    result.threshold = state.threshold;
    result.iterations = state.iterations;
    result.best_value = state.best_value;
    result.best_params = ConfigParams::from_array(state.best_params);
    result.verified_volume_fraction = state.retired.fraction();
    result.wall_time = state.elapsed_seconds;
    result.retired_sample = reservoir.take();
    result.proven = !failed && state.pending.empty();

    if (failed) {
        result.witness = witness;
    } else if (!state.pending.empty()) {
        const PendingBox& next = state.pending.back();
        Objective5 objective = factory();
        SearchWitness w;
        w.box = next.box;
        w.value = objective(next.box.center());
        w.margin = box_margin(next.box, state.constants, objective);
        w.reason = "iteration budget reached with boxes pending";
        result.witness = w;
    }
    return result;
}

SearchResult run_search(const Box5& domain, double threshold,
                        const LipschitzConstants& constants,
                        const SearchOptions& opts, const ShapeSpec& spec) {
    EngineState state = make_engine_state(domain, threshold, constants,
                                          opts.eps_fp, opts.min_box_width);
    return run_search(state, config_objective_factory(spec), opts);
}

ProgressRow progress_stats(const EngineState& state) {
    ProgressRow row;
    row.percent = 100.0 * state.retired.fraction();
    row.iterations = state.iterations;
    row.best_value = state.best_value;
    row.elapsed_s = state.elapsed_seconds;
    return row;
}

namespace {

constexpr const char* kCheckpointMagic = "cover-box-search-checkpoint";
constexpr int kCheckpointVersion = 1;

void write_double(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

void expect_label(std::istream& is, const char* label) {
    std::string token;
    if (!(is >> token) || token != label)
        throw std::runtime_error(std::string("checkpoint: expected field '") +
                                 label + "', found '" + token + "'");
}

double read_double(std::istream& is, const char* label) {
    double v = 0.0;
    if (!(is >> v))
        throw std::runtime_error(std::string("checkpoint: bad value for '") +
                                 label + "'");
    return v;
}

}  // namespace

void checkpoint_save(const EngineState& state, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("checkpoint: cannot write " + tmp);
        os << kCheckpointMagic << " v" << kCheckpointVersion << "\n";
        os << "threshold ";
        write_double(os, state.threshold);
        os << "\neps_fp ";
        write_double(os, state.eps_fp);
        os << "\nmin_box_width ";
        write_double(os, state.min_box_width);
        os << "\nconstants";
        for (double c : state.constants.as_array()) {
            os << ' ';
            write_double(os, c);
        }
        os << "\ndomain";
        for (double v : state.domain.lo) {
            os << ' ';
            write_double(os, v);
        }
        for (double v : state.domain.hi) {
            os << ' ';
            write_double(os, v);
        }
        os << "\niterations " << state.iterations;
        os << "\nretired " << state.retired.integer_part() << std::hex;
        for (auto limb : state.retired.limbs()) os << ' ' << limb;
        os << std::dec;
        os << "\nbest_value ";
        write_double(os, state.best_value);
        os << "\nbest_params";
        for (double v : state.best_params) {
            os << ' ';
            write_double(os, v);
        }
        os << "\nelapsed_seconds ";
        write_double(os, state.elapsed_seconds);
        os << "\npending " << state.pending.size() << "\n";
        for (const auto& p : state.pending) {
            os << p.depth;
            for (double v : p.box.lo) {
                os << ' ';
                write_double(os, v);
            }
            for (double v : p.box.hi) {
                os << ' ';
                write_double(os, v);
            }
            os << "\n";
        }
        os << "end\n";
        if (!os) throw std::runtime_error("checkpoint: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

EngineState checkpoint_load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("checkpoint: cannot open " + path);

    std::string magic, version;
    if (!(is >> magic >> version) || magic != kCheckpointMagic)
        throw std::runtime_error("checkpoint: unrecognized header in " + path);
    if (version != "v1")
        throw std::runtime_error("checkpoint: unsupported version " + version);

    EngineState state;
    expect_label(is, "threshold");
    state.threshold = read_double(is, "threshold");
    expect_label(is, "eps_fp");
    state.eps_fp = read_double(is, "eps_fp");
    expect_label(is, "min_box_width");
    state.min_box_width = read_double(is, "min_box_width");
    expect_label(is, "constants");
    LipschitzConstants c;
    c.c1 = read_double(is, "constants");
    c.c2 = read_double(is, "constants");
    c.c3 = read_double(is, "constants");
    c.c4 = read_double(is, "constants");
    c.c5 = read_double(is, "constants");
    state.constants = c;
    expect_label(is, "domain");
    for (auto& v : state.domain.lo) v = read_double(is, "domain");
    for (auto& v : state.domain.hi) v = read_double(is, "domain");
    expect_label(is, "iterations");
    if (!(is >> state.iterations))
        throw std::runtime_error("checkpoint: bad value for 'iterations'");
    expect_label(is, "retired");
    std::uint64_t ones = 0;
    if (!(is >> ones)) throw std::runtime_error("checkpoint: bad retired count");
    std::array<std::uint64_t, VolumeLedger::kLimbs> limbs{};
    is >> std::hex;
    for (auto& limb : limbs)
        if (!(is >> limb)) throw std::runtime_error("checkpoint: bad retired limbs");
    is >> std::dec;
    state.retired = VolumeLedger::from_raw(ones, limbs);
    expect_label(is, "best_value");
    state.best_value = read_double(is, "best_value");
    expect_label(is, "best_params");
    for (auto& v : state.best_params) v = read_double(is, "best_params");
    expect_label(is, "elapsed_seconds");
    state.elapsed_seconds = read_double(is, "elapsed_seconds");
    expect_label(is, "pending");
    std::size_t count = 0;
    if (!(is >> count)) throw std::runtime_error("checkpoint: bad pending count");
    state.pending.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        PendingBox p;
        if (!(is >> p.depth))
            throw std::runtime_error("checkpoint: truncated pending list");
        for (auto& v : p.box.lo) v = read_double(is, "pending box");
        for (auto& v : p.box.hi) v = read_double(is, "pending box");
        if (!p.box.valid())
            throw std::runtime_error("checkpoint: corrupt pending box");
        state.pending.push_back(p);
    }
    std::string sentinel;
    if (!(is >> sentinel) || sentinel != "end")
        throw std::runtime_error("checkpoint: missing end marker (truncated file?)");

    if (!(state.threshold > 0.0) || !state.domain.valid())
        throw std::runtime_error("checkpoint: inconsistent header values");
    return state;
}

}  // namespace cover
