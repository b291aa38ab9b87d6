#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

namespace acm {

/** Axis-aligned box over the branched parameters. */
struct Cube {
    std::vector<double> lo;
    std::vector<double> hi;
    int depth = 0;

    std::size_t dims() const { return lo.size(); }

    std::vector<double> center() const {
        std::vector<double> c(lo.size());
        for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
        return c;
    }

    double diameter() const {
        double s = 0.0;
        for (std::size_t i = 0; i < lo.size(); ++i) {
            const double w = hi[i] - lo[i];
            s += w * w;
        }
        return std::sqrt(s);
    }

    /** 2^dims congruent children, one per orthant around the center. */
    std::vector<Cube> split() const {
        const std::size_t n = dims();
        const std::vector<double> c = center();
        std::vector<Cube> children;
        children.reserve(std::size_t{1} << n);
        for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
            Cube child;
            child.lo.resize(n);
            child.hi.resize(n);
            child.depth = depth + 1;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (std::uint32_t{1} << i)) {
                    child.lo[i] = c[i];
                    child.hi[i] = hi[i];
                } else {
                    child.lo[i] = lo[i];
                    child.hi[i] = c[i];
                }
            }
            children.push_back(std::move(child));
        }
        return children;
    }
};

/** Feasible consensus count at a concrete parameter inside the cube. */
struct LowerEval {
    int count = 0;
    std::vector<double> witness;
};

/**
 * Bounding oracle driving the search. branch_dims() is the number of
 * branched parameters; lower() returns an achievable count together with the
 * full parameter vector attaining it (which may have more entries than
 * branch_dims() when trailing parameters are solved exactly); upper() never
 * undercounts the best achievable count inside the cube.
 */
template <typename B>
concept Bounder = requires(const B& b, const Cube& c) {
    { b.branch_dims() } -> std::convertible_to<std::size_t>;
    { b.lower(c) } -> std::convertible_to<LowerEval>;
    { b.upper(c) } -> std::convertible_to<int>;
};

struct TraceRow {
    long iteration = 0;
    int best_lower = 0;
    int popped_upper = 0;
    std::size_t queue_len = 0;
};

struct SolveReport {
    std::vector<double> best_param;
    int best_count = 0;
    long iterations = 0;
    long cubes_pruned = 0;
    long cubes_split = 0;
    std::size_t max_queue_len = 0;
    double wall_time = 0.0;
    std::vector<TraceRow> trace;
};

struct SolveOptions {
    int max_depth = 10;
    bool record_trace = false;
    // Called once per popped cube with its evaluated bounds.
    std::function<void(const Cube&, const LowerEval&, int)> on_visit;
};

inline void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
    os << "iteration,best_lower,popped_upper,queue_len\n";
    for (const TraceRow& r : trace)
        os << r.iteration << ',' << r.best_lower << ',' << r.popped_upper << ',' << r.queue_len
           << '\n';
}

/**
 * Best-first branch and bound. Pops the cube with the largest upper bound
 * (ties: deeper first, then insertion order), evaluates the lower bound at
 * its center, and returns as soon as the popped upper bound equals the best
 * lower bound found. Cubes at max_depth still contribute lower bounds but
 * are never split. Upper bounds are computed once, at insertion.
 */
template <Bounder B>
SolveReport solve(const B& bounder, Cube initial, const SolveOptions& opts = {}) {
    const std::size_t n = bounder.branch_dims();
    if (initial.dims() != n || initial.hi.size() != n)
        throw std::invalid_argument("solve: cube dimension does not match bounder");
    for (std::size_t i = 0; i < n; ++i)
        if (initial.lo[i] > initial.hi[i])
            throw std::invalid_argument("solve: cube has lo > hi");

    struct Entry {
        int upper;
        int depth;
        std::uint64_t seq;
        Cube cube;
    };
    struct Order {
        bool operator()(const Entry& a, const Entry& b) const {
            if (a.upper != b.upper) return a.upper < b.upper;
            if (a.depth != b.depth) return a.depth < b.depth;
            return a.seq > b.seq;
        }
    };

    const auto t0 = std::chrono::steady_clock::now();
    SolveReport report;
    report.best_param = initial.center();

    std::priority_queue<Entry, std::vector<Entry>, Order> queue;
    std::uint64_t seq = 0;
    initial.depth = 0;
    queue.push({bounder.upper(initial), 0, seq++, std::move(initial)});
    report.max_queue_len = 1;

    while (!queue.empty()) {
        Entry entry = queue.top();
        queue.pop();
        ++report.iterations;

        const LowerEval low = bounder.lower(entry.cube);
        if (low.count > report.best_count) {
            report.best_count = low.count;
            report.best_param = low.witness;
        }
        if (opts.on_visit) opts.on_visit(entry.cube, low, entry.upper);
        if (opts.record_trace)
            report.trace.push_back(
                {report.iterations, report.best_count, entry.upper, queue.size()});

        if (entry.upper == report.best_count) break;
        if (entry.upper < report.best_count) {
            ++report.cubes_pruned;
            continue;
        }
        if (entry.cube.depth >= opts.max_depth) continue;

        ++report.cubes_split;
        for (Cube& child : entry.cube.split()) {
            const int up = bounder.upper(child);
            if (up < report.best_count) {
                ++report.cubes_pruned;
                continue;
            }
            const int depth = child.depth;
            queue.push({up, depth, seq++, std::move(child)});
        }
        report.max_queue_len = std::max(report.max_queue_len, queue.size());
    }

    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

}  // namespace acm
