#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "acm/interval.hpp"

namespace testutil {

/** Quadratic-time stabbing reference: try every endpoint as the stabber. */
inline int stab_oracle(const std::vector<acm::Interval>& intervals) {
    int best = 0;
    for (const acm::Interval& cand : intervals) {
        for (double x : {cand.lo, cand.hi}) {
            int count = 0;
            for (const acm::Interval& iv : intervals)
                if (iv.lo <= x && x <= iv.hi) ++count;
            best = std::max(best, count);
        }
    }
    return best;
}

/** Per-set stabbing reference: each set contributes at most one. */
inline int stab_sets_oracle(const std::vector<acm::IntervalSet>& sets) {
    std::vector<double> cands;
    for (const acm::IntervalSet& s : sets)
        for (const acm::Interval& iv : s.parts()) {
            cands.push_back(iv.lo);
            cands.push_back(iv.hi);
        }
    int best = 0;
    for (double x : cands) {
        int count = 0;
        for (const acm::IntervalSet& s : sets)
            if (s.contains(x)) ++count;
        best = std::max(best, count);
    }
    return best;
}

/**
 * Sine-form reference for a1*sin(x) + a2*cos(x) + a3 in [lo, hi]: write the
 * function as A*sin(x + beta) + a3 and enumerate the five arcsin branches
 * that can intersect [-pi, pi].
 */
inline acm::IntervalSet solve_sinusoid_leq_sine(double a1, double a2, double a3, double lo,
                                                double hi) {
    const double amp = std::hypot(a1, a2);
    if (amp < 1e-300) {
        if (a3 >= lo && a3 <= hi) return acm::IntervalSet{{{-acm::kPi, acm::kPi}}};
        return {};
    }
    const double s1 = std::max(-1.0, (lo - a3) / amp);
    const double s2 = std::min(1.0, (hi - a3) / amp);
    if (s1 > s2) return {};
    const double beta = std::atan2(a2, a1);
    const double c5 = std::asin(s1);
    const double c6 = std::asin(s2);
    std::vector<acm::Interval> parts;
    auto clip_push = [&parts](double a, double b) {
        const double lo2 = std::max(a, -acm::kPi);
        const double hi2 = std::min(b, acm::kPi);
        if (lo2 <= hi2) parts.push_back({lo2, hi2});
    };
    clip_push(c5 - beta, c6 - beta);
    clip_push(acm::kPi - c6 - beta, acm::kPi - c5 - beta);
    clip_push(-acm::kPi - c6 - beta, -acm::kPi - c5 - beta);
    clip_push(2.0 * acm::kPi + c5 - beta, 2.0 * acm::kPi + c6 - beta);
    clip_push(-2.0 * acm::kPi + c5 - beta, -2.0 * acm::kPi + c6 - beta);
    return acm::IntervalSet{std::move(parts)};
}

/** Drop parts narrower than tol and merge parts separated by less than tol. */
inline std::vector<acm::Interval> canon_parts(const acm::IntervalSet& set, double tol) {
    std::vector<acm::Interval> out;
    for (const acm::Interval& iv : set.parts()) {
        if (iv.width() < tol) continue;
        if (!out.empty() && iv.lo - out.back().hi < tol)
            out.back().hi = std::max(out.back().hi, iv.hi);
        else
            out.push_back(iv);
    }
    return out;
}

/** Endpoint-wise equality of two interval sets up to tol. */
inline bool sets_close(const acm::IntervalSet& a, const acm::IntervalSet& b, double tol) {
    const std::vector<acm::Interval> pa = canon_parts(a, tol);
    const std::vector<acm::Interval> pb = canon_parts(b, tol);
    if (pa.size() != pb.size()) return false;
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (std::abs(pa[i].lo - pb[i].lo) > tol || std::abs(pa[i].hi - pb[i].hi) > tol)
            return false;
    return true;
}

}  // namespace testutil
