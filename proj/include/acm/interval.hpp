#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace acm {

inline constexpr double kPi = 3.14159265358979323846;

/**
 * Closed interval [lo, hi] with finite endpoints.
 */
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw std::invalid_argument("Interval: endpoints must be finite");
        if (lo > hi)
            throw std::invalid_argument("Interval: lo > hi");
    }

    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

inline Interval interval_add(const Interval& x, const Interval& y) {
    return {x.lo + y.lo, x.hi + y.hi};
}

inline Interval interval_sub(const Interval& x, const Interval& y) {
    return {x.lo - y.hi, x.hi - y.lo};
}

inline Interval interval_mul(const Interval& x, const Interval& y) {
    const double p1 = x.lo * y.lo;
    const double p2 = x.lo * y.hi;
    const double p3 = x.hi * y.lo;
    const double p4 = x.hi * y.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

/** Requires y.lo > 0. */
inline Interval interval_div(const Interval& x, const Interval& y) {
    if (y.lo <= 0.0)
        throw std::domain_error("interval_div: divisor must satisfy lo > 0");
    return interval_mul(x, Interval{1.0 / y.hi, 1.0 / y.lo});
}

inline Interval interval_min(const Interval& x, const Interval& y) {
    return {std::min(x.lo, y.lo), std::min(x.hi, y.hi)};
}

inline Interval interval_max(const Interval& x, const Interval& y) {
    return {std::max(x.lo, y.lo), std::max(x.hi, y.hi)};
}

/** Tightest interval containing {t*t : t in x}. */
inline Interval interval_sq(const Interval& x) {
    const double a = x.lo * x.lo;
    const double b = x.hi * x.hi;
    if (x.lo <= 0.0 && x.hi >= 0.0) return {0.0, std::max(a, b)};
    return {std::min(a, b), std::max(a, b)};
}

/** Tightest interval containing {|t| : t in x}. */
inline Interval interval_abs(const Interval& x) {
    const double a = std::abs(x.lo);
    const double b = std::abs(x.hi);
    if (x.lo <= 0.0 && x.hi >= 0.0) return {0.0, std::max(a, b)};
    return {std::min(a, b), std::max(a, b)};
}

namespace detail {

// Smallest integer k with a <= k*step.
inline long long ceil_div_step(double a, double step) {
    return static_cast<long long>(std::ceil(a / step));
}

// True when some x = offset + 2*pi*k lies inside [lo, hi].
inline bool arc_contains_phase(double lo, double hi, double offset) {
    const long long k = ceil_div_step(lo - offset, 2.0 * kPi);
    return offset + 2.0 * kPi * static_cast<double>(k) <= hi;
}

}  // namespace detail

/** Exact range of cos over [x.lo, x.hi]. */
inline Interval cos_range(const Interval& x) {
    if (x.width() >= 2.0 * kPi) return {-1.0, 1.0};
    const double ca = std::cos(x.lo);
    const double cb = std::cos(x.hi);
    double lo = std::min(ca, cb);
    double hi = std::max(ca, cb);
    if (detail::arc_contains_phase(x.lo, x.hi, 0.0)) hi = 1.0;
    if (detail::arc_contains_phase(x.lo, x.hi, kPi)) lo = -1.0;
    return {lo, hi};
}

/** Exact range of sin over [x.lo, x.hi]. */
inline Interval sin_range(const Interval& x) {
    if (x.width() >= 2.0 * kPi) return {-1.0, 1.0};
    const double sa = std::sin(x.lo);
    const double sb = std::sin(x.hi);
    double lo = std::min(sa, sb);
    double hi = std::max(sa, sb);
    if (detail::arc_contains_phase(x.lo, x.hi, 0.5 * kPi)) hi = 1.0;
    if (detail::arc_contains_phase(x.lo, x.hi, -0.5 * kPi)) lo = -1.0;
    return {lo, hi};
}

/**
 * Finite union of closed intervals, kept sorted and disjoint; parts that
 * overlap or touch are merged on construction.
 */
class IntervalSet {
  public:
    IntervalSet() = default;

    explicit IntervalSet(std::vector<Interval> parts) {
        std::sort(parts.begin(), parts.end(),
                  [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
        for (const Interval& p : parts) {
            if (!parts_.empty() && p.lo <= parts_.back().hi)
                parts_.back().hi = std::max(parts_.back().hi, p.hi);
            else
                parts_.push_back(p);
        }
    }

    const std::vector<Interval>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    std::size_t size() const { return parts_.size(); }

    double measure() const {
        double m = 0.0;
        for (const Interval& p : parts_) m += p.width();
        return m;
    }

    bool contains(double x) const {
        auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                                   [](double v, const Interval& p) { return v < p.lo; });
        return it != parts_.begin() && std::prev(it)->hi >= x;
    }

    friend IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
        IntervalSet out;
        std::size_t i = 0, j = 0;
        while (i < a.parts_.size() && j < b.parts_.size()) {
            const Interval& x = a.parts_[i];
            const Interval& y = b.parts_[j];
            const double lo = std::max(x.lo, y.lo);
            const double hi = std::min(x.hi, y.hi);
            if (lo <= hi) out.parts_.push_back({lo, hi});
            if (x.hi < y.hi)
                ++i;
            else
                ++j;
        }
        return out;
    }

  private:
    std::vector<Interval> parts_;
};

/** Max-stabbing outcome: best count and one point attaining it. */
struct StabResult {
    int count = 0;
    double stabber = std::numeric_limits<double>::quiet_NaN();
};

/** One interval endpoint in a stabbing sweep. */
struct StabEvent {
    double x;
    bool is_left;
};

/**
 * Sweep a caller-owned endpoint buffer (sorted in place). At equal
 * coordinates left endpoints come first so that touching intervals are both
 * counted. The stabber is the midpoint of the first window where the maximum
 * is attained. Callers that evaluate many stabs reuse the buffer to avoid
 * per-call allocation.
 */
inline StabResult stab_events(std::vector<StabEvent>& pts) {
    if (pts.empty()) return {};
    std::sort(pts.begin(), pts.end(), [](const StabEvent& a, const StabEvent& b) {
        if (a.x != b.x) return a.x < b.x;
        return a.is_left && !b.is_left;
    });
    int depth = 0;
    int best = 0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].is_left) {
            ++depth;
            if (depth > best) {
                best = depth;
                best_idx = i;
            }
        } else {
            --depth;
        }
    }
    const double lo = pts[best_idx].x;
    const double hi = best_idx + 1 < pts.size() ? pts[best_idx + 1].x : lo;
    return {best, 0.5 * (lo + hi)};
}

/**
 * Same sweep over separately collected left and right endpoints (both sorted
 * in place). Cheaper than sorting tagged events when the caller already
 * splits the endpoints.
 */
inline StabResult stab_sorted(std::vector<double>& starts, std::vector<double>& ends) {
    if (starts.empty()) return {};
    std::sort(starts.begin(), starts.end());
    std::sort(ends.begin(), ends.end());
    StabResult r;
    int depth = 0;
    const std::size_t n = starts.size();
    std::size_t i = 0, j = 0;
    while (i < n) {
        if (starts[i] <= ends[j]) {
            ++depth;
            if (depth > r.count) {
                r.count = depth;
                const double next = i + 1 < n ? std::min(starts[i + 1], ends[j]) : ends[j];
                r.stabber = 0.5 * (starts[i] + next);
            }
            ++i;
        } else {
            --depth;
            ++j;
        }
    }
    return r;
}

/**
 * Point stabbing a maximum number of closed intervals. Sort-and-sweep over
 * endpoints, O(L log L).
 */
inline StabResult stab(const std::vector<Interval>& intervals) {
    std::vector<StabEvent> pts;
    pts.reserve(2 * intervals.size());
    for (const Interval& iv : intervals) {
        pts.push_back({iv.lo, true});
        pts.push_back({iv.hi, false});
    }
    return stab_events(pts);
}

/**
 * Point stabbing a maximum number of interval sets, where each set counts at
 * most once. Equivalent to stabbing the flattened parts because parts within
 * a set are disjoint.
 */
inline StabResult stab_sets(const std::vector<IntervalSet>& sets) {
    std::vector<Interval> flat;
    for (const IntervalSet& s : sets)
        for (const Interval& p : s.parts()) flat.push_back(p);
    return stab(flat);
}

/**
 * Exact solution set of lo <= a1*sin(x) + a2*cos(x) + a3 <= hi over
 * x in [-pi, pi].
 */
inline IntervalSet solve_sinusoid_leq(double a1, double a2, double a3, double lo, double hi) {
    const double amp = std::hypot(a1, a2);
    if (amp == 0.0) {
        if (lo <= a3 && a3 <= hi) return IntervalSet{{Interval{-kPi, kPi}}};
        return {};
    }
    const double c1 = std::max(-1.0, (lo - a3) / amp);
    const double c2 = std::min(1.0, (hi - a3) / amp);
    if (c1 > c2) return {};
    const double beta = std::atan2(a1, a2);
    const double c3 = std::acos(c2);
    const double c4 = std::acos(c1);
    std::vector<Interval> parts;
    auto clip_push = [&parts](double l, double h) {
        l = std::max(l, -kPi);
        h = std::min(h, kPi);
        if (l <= h) parts.push_back({l, h});
    };
    for (const double shift : {0.0, -2.0 * kPi, 2.0 * kPi}) {
        clip_push(beta + shift - c4, beta + shift - c3);
        clip_push(beta + shift + c3, beta + shift + c4);
    }
    return IntervalSet{std::move(parts)};
}

}  // namespace acm
