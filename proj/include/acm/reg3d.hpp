#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "acm/engine.hpp"
#include "acm/interval.hpp"

namespace acm {

/** Matched 3D points in the two frames. */
struct Corr3D3D {
    Eigen::Vector3d p;
    Eigen::Vector3d q;
};

/** Rotation-invariant residual | ||q|| - ||p + t|| |. */
inline double reg3d_residual(const Corr3D3D& c, const Eigen::Vector3d& t) {
    return std::abs(c.q.norm() - (c.p + t).norm());
}

namespace detail {

/**
 * Radial window ||q|| within eps of ||p + t||, stored squared:
 * c1 <= ||p + t||^2 <= c2 with c1 = max(0, ||q|| - eps)^2, c2 = (||q|| + eps)^2.
 */
struct Ring {
    Eigen::Vector3d p;
    double c1 = 0.0;
    double c2 = 0.0;
};

inline Ring make_ring(const Eigen::Vector3d& p, double q_norm, double eps) {
    const double inner = std::max(0.0, q_norm - eps);
    return {p, inner * inner, (q_norm + eps) * (q_norm + eps)};
}

// t3 values with s_lo <= (p3 + t3)^2 <= s_hi, as up to two symmetric parts.
inline void push_ring_parts(std::vector<Interval>& parts, double p3, double s_lo, double s_hi) {
    if (s_hi < 0.0) return;
    const double a = std::sqrt(std::max(0.0, s_lo));
    const double b = std::sqrt(s_hi);
    parts.push_back({a - p3, b - p3});
    parts.push_back({-b - p3, -a - p3});
}

// Fixed axis grid counting how many marked windows cover each cell. Window
// ends snap outward to cell edges, so the peak never undercounts the exact
// stab of the same windows.
class CoverageGrid {
  public:
    void init(double lo, double hi) {
        lo_ = lo;
        inv_ = kCells / std::max(hi - lo, 1e-9);
        cover_.assign(kCells + 1, 0);
    }

    void clear() const { std::fill(cover_.begin(), cover_.end(), 0); }

    void mark(double a, double b) const {
        int ia = static_cast<int>((a - lo_) * inv_);
        int ib = static_cast<int>((b - lo_) * inv_);
        ia = std::clamp(ia, 0, kCells - 1);
        ib = std::clamp(ib, ia, kCells - 1);
        ++cover_[ia];
        --cover_[ib + 1];
    }

    int peak() const {
        int best = 0, run = 0;
        for (const int v : cover_) {
            run += v;
            best = std::max(best, run);
        }
        return best;
    }

  private:
    static constexpr int kCells = 4096;
    double lo_ = 0.0;
    double inv_ = 1.0;
    mutable std::vector<int> cover_;
};

// Same window as disjoint ascending parts in a caller-owned array; the two
// symmetric branches merge into one part when they touch at zero.
inline int ring_parts(Interval out[2], double p3, double s_lo, double s_hi) {
    if (s_hi < 0.0) return 0;
    const double b = std::sqrt(s_hi);
    if (s_lo <= 0.0) {
        out[0] = {-b - p3, b - p3};
        return 1;
    }
    const double a = std::sqrt(s_lo);
    out[0] = {-b - p3, -a - p3};
    out[1] = {a - p3, b - p3};
    return 2;
}

/** Exact feasible t3 set of the ring at fixed (t1, t2). */
inline IntervalSet ring_set_at(const Ring& r, double t1, double t2) {
    const double e1 = r.p.x() + t1;
    const double e2 = r.p.y() + t2;
    const double h1 = e1 * e1 + e2 * e2;
    std::vector<Interval> parts;
    push_ring_parts(parts, r.p.z(), r.c1 - h1, r.c2 - h1);
    return IntervalSet{std::move(parts)};
}

/** Relaxed feasible t3 set of the ring over a 2D (t1, t2) box. */
inline IntervalSet ring_set_over(const Ring& r, const Cube& cube) {
    const Interval h1 =
        interval_add(interval_sq({r.p.x() + cube.lo[0], r.p.x() + cube.hi[0]}),
                     interval_sq({r.p.y() + cube.lo[1], r.p.y() + cube.hi[1]}));
    std::vector<Interval> parts;
    push_ring_parts(parts, r.p.z(), r.c1 - h1.hi, r.c2 - h1.lo);
    return IntervalSet{std::move(parts)};
}

}  // namespace detail

/** Plain 3D translation search bounds for matched points. */
class PlainCorrBounder {
  public:
    PlainCorrBounder(const std::vector<Corr3D3D>& corrs, double eps) : eps_(eps) {
        items_.reserve(corrs.size());
        for (const Corr3D3D& c : corrs) items_.push_back({c.p, c.q.norm()});
    }

    std::size_t branch_dims() const { return 3; }

    LowerEval lower(const Cube& cube) const {
        const std::vector<double> c = cube.center();
        const Eigen::Vector3d t(c[0], c[1], c[2]);
        int count = 0;
        for (const Item& it : items_)
            if (std::abs(it.q_norm - (it.p + t).norm()) <= eps_) ++count;
        return {count, c};
    }

    int upper(const Cube& cube) const {
        const std::vector<double> c = cube.center();
        const Eigen::Vector3d t(c[0], c[1], c[2]);
        const double r = 0.5 * cube.diameter();
        int count = 0;
        for (const Item& it : items_) {
            const double mid = it.q_norm - (it.p + t).norm();
            if (interval_abs({mid - r, mid + r}).lo <= eps_) ++count;
        }
        return count;
    }

  private:
    struct Item {
        Eigen::Vector3d p;
        double q_norm;
    };
    std::vector<Item> items_;
    double eps_;
};

/**
 * Accelerated bounds: branch (t1, t2), solve t3 by interval stabbing. The
 * lower bound stabs exact windows at the cube center; the upper bound counts
 * coverage of the relaxed windows on a fixed t3 grid, snapping window ends
 * outward so the count never drops below the exact stab.
 */
class AcmCorrBounder {
  public:
    AcmCorrBounder(const std::vector<Corr3D3D>& corrs, double eps) {
        rings_.reserve(corrs.size());
        double z0 = 0.0, z1 = 1.0;
        for (const Corr3D3D& c : corrs) {
            rings_.push_back(detail::make_ring(c.p, c.q.norm(), eps));
            const detail::Ring& r = rings_.back();
            const double reach = std::sqrt(r.c2);
            if (rings_.size() == 1) {
                z0 = -reach - r.p.z();
                z1 = reach - r.p.z();
            } else {
                z0 = std::min(z0, -reach - r.p.z());
                z1 = std::max(z1, reach - r.p.z());
            }
        }
        grid_.init(z0, z1);
    }

    std::size_t branch_dims() const { return 2; }

    LowerEval lower(const Cube& cube) const {
        const double t1 = 0.5 * (cube.lo[0] + cube.hi[0]);
        const double t2 = 0.5 * (cube.lo[1] + cube.hi[1]);
        starts_.clear();
        ends_.clear();
        for (const detail::Ring& r : rings_) {
            const double e1 = r.p.x() + t1;
            const double e2 = r.p.y() + t2;
            const double h1 = e1 * e1 + e2 * e2;
            const double s_hi = r.c2 - h1;
            if (s_hi < 0.0) continue;
            const double b = std::sqrt(s_hi);
            const double s_lo = r.c1 - h1;
            if (s_lo > 0.0) {
                const double a = std::sqrt(s_lo);
                starts_.push_back(-b - r.p.z());
                ends_.push_back(-a - r.p.z());
                starts_.push_back(a - r.p.z());
                ends_.push_back(b - r.p.z());
            } else {
                starts_.push_back(-b - r.p.z());
                ends_.push_back(b - r.p.z());
            }
        }
        const StabResult s = stab_sorted(starts_, ends_);
        return {s.count, {t1, t2, s.count > 0 ? s.stabber : 0.0}};
    }

    int upper(const Cube& cube) const {
        grid_.clear();
        for (const detail::Ring& r : rings_) {
            const double ax = r.p.x() + cube.lo[0], bx = r.p.x() + cube.hi[0];
            const double ay = r.p.y() + cube.lo[1], by = r.p.y() + cube.hi[1];
            const double ax2 = ax * ax, bx2 = bx * bx;
            const double ay2 = ay * ay, by2 = by * by;
            const double h1_lo = (ax <= 0.0 && bx >= 0.0 ? 0.0 : std::min(ax2, bx2)) +
                                 (ay <= 0.0 && by >= 0.0 ? 0.0 : std::min(ay2, by2));
            const double s_hi = r.c2 - h1_lo;
            if (s_hi < 0.0) continue;
            const double b = std::sqrt(s_hi);
            const double s_lo = r.c1 - (std::max(ax2, bx2) + std::max(ay2, by2));
            if (s_lo > 0.0) {
                const double a = std::sqrt(s_lo);
                grid_.mark(-b - r.p.z(), -a - r.p.z());
                grid_.mark(a - r.p.z(), b - r.p.z());
            } else {
                grid_.mark(-b - r.p.z(), b - r.p.z());
            }
        }
        return grid_.peak();
    }

  private:
    std::vector<detail::Ring> rings_;
    // Scratch reused across bound evaluations; a bounder instance is
    // therefore not safe for concurrent evaluation.
    detail::CoverageGrid grid_;
    mutable std::vector<double> starts_, ends_;
};

/** Candidate match between a point pair in each set. */
struct RiPair {
    Eigen::Vector3d p1, p2;
    Eigen::Vector3d q1, q2;
    int pa = -1, pb = -1;  // source indices into the first set
    int qa = -1, qb = -1;  // source indices into the second set
};

/** Infinity norm of the two radial sub-residuals. */
inline double ri_pair_residual(const RiPair& c, const Eigen::Vector3d& t) {
    return std::max(std::abs(c.q1.norm() - (c.p1 + t).norm()),
                    std::abs(c.q2.norm() - (c.p2 + t).norm()));
}

/**
 * Candidate matches between the two point sets: within each set take the
 * `keep` point pairs of largest inter-point distance, then cross-match pairs
 * whose lengths differ by at most tau. Each surviving combination yields
 * both point assignments.
 */
inline std::vector<RiPair> build_ri_pairs(const std::vector<Eigen::Vector3d>& pset,
                                          const std::vector<Eigen::Vector3d>& qset, double tau,
                                          std::size_t keep) {
    struct Seg {
        double len;
        int a, b;
    };
    auto longest = [keep](const std::vector<Eigen::Vector3d>& pts) {
        std::vector<Seg> segs;
        segs.reserve(pts.size() * (pts.size() - 1) / 2);
        for (int i = 0; i < static_cast<int>(pts.size()); ++i)
            for (int j = i + 1; j < static_cast<int>(pts.size()); ++j)
                segs.push_back({(pts[i] - pts[j]).norm(), i, j});
        std::sort(segs.begin(), segs.end(), [](const Seg& x, const Seg& y) {
            if (x.len != y.len) return x.len > y.len;
            return std::make_pair(x.a, x.b) < std::make_pair(y.a, y.b);
        });
        if (segs.size() > keep) segs.resize(keep);
        return segs;
    };

    std::vector<Seg> psegs = longest(pset);
    std::vector<Seg> qsegs = longest(qset);
    std::sort(qsegs.begin(), qsegs.end(), [](const Seg& x, const Seg& y) { return x.len < y.len; });
    std::vector<double> qlens(qsegs.size());
    for (std::size_t i = 0; i < qsegs.size(); ++i) qlens[i] = qsegs[i].len;

    std::vector<RiPair> out;
    for (const Seg& ps : psegs) {
        const auto first = std::lower_bound(qlens.begin(), qlens.end(), ps.len - tau);
        const auto last = std::upper_bound(qlens.begin(), qlens.end(), ps.len + tau);
        for (auto it = first; it != last; ++it) {
            const Seg& qs = qsegs[static_cast<std::size_t>(it - qlens.begin())];
            out.push_back({pset[ps.a], pset[ps.b], qset[qs.a], qset[qs.b], ps.a, ps.b, qs.a, qs.b});
            out.push_back({pset[ps.b], pset[ps.a], qset[qs.a], qset[qs.b], ps.b, ps.a, qs.a, qs.b});
        }
    }
    return out;
}

/** Plain 3D translation search bounds for candidate pair matches. */
class PlainCorrlessBounder {
  public:
    PlainCorrlessBounder(const std::vector<RiPair>& pairs, double eps) : eps_(eps) {
        items_.reserve(pairs.size());
        for (const RiPair& c : pairs)
            items_.push_back({c.p1, c.p2, c.q1.norm(), c.q2.norm()});
    }

    std::size_t branch_dims() const { return 3; }

    LowerEval lower(const Cube& cube) const {
        const std::vector<double> c = cube.center();
        const Eigen::Vector3d t(c[0], c[1], c[2]);
        int count = 0;
        for (const Item& it : items_) {
            const double ru = std::abs(it.qn1 - (it.p1 + t).norm());
            const double rv = std::abs(it.qn2 - (it.p2 + t).norm());
            if (std::max(ru, rv) <= eps_) ++count;
        }
        return {count, c};
    }

    int upper(const Cube& cube) const {
        const std::vector<double> c = cube.center();
        const Eigen::Vector3d t(c[0], c[1], c[2]);
        const double r = 0.5 * cube.diameter();
        int count = 0;
        for (const Item& it : items_) {
            const double cu = it.qn1 - (it.p1 + t).norm();
            const double cv = it.qn2 - (it.p2 + t).norm();
            const double ul = interval_abs({cu - r, cu + r}).lo;
            const double vl = interval_abs({cv - r, cv + r}).lo;
            if (std::max(ul, vl) <= eps_) ++count;
        }
        return count;
    }

  private:
    struct Item {
        Eigen::Vector3d p1, p2;
        double qn1, qn2;
    };
    std::vector<Item> items_;
    double eps_;
};

/**
 * Accelerated bounds for candidate pair matches. A pair is feasible where
 * both of its radial windows admit the same t3; per-pair sets are the
 * intersection of the two inverted windows. Setting union_mode joins them
 * instead, which overcounts pairs satisfying only one window.
 */
class AcmCorrlessBounder {
  public:
    AcmCorrlessBounder(const std::vector<RiPair>& pairs, double eps, bool union_mode = false)
        : union_mode_(union_mode) {
        rings_.reserve(pairs.size());
        double z0 = 0.0, z1 = 1.0;
        bool first = true;
        for (const RiPair& c : pairs) {
            rings_.push_back({detail::make_ring(c.p1, c.q1.norm(), eps),
                              detail::make_ring(c.p2, c.q2.norm(), eps)});
            for (const detail::Ring& r : {rings_.back().first, rings_.back().second}) {
                const double reach = std::sqrt(r.c2);
                if (first) {
                    z0 = -reach - r.p.z();
                    z1 = reach - r.p.z();
                    first = false;
                } else {
                    z0 = std::min(z0, -reach - r.p.z());
                    z1 = std::max(z1, reach - r.p.z());
                }
            }
        }
        grid_.init(z0, z1);
    }

    std::size_t branch_dims() const { return 2; }

    LowerEval lower(const Cube& cube) const {
        const double t1 = 0.5 * (cube.lo[0] + cube.hi[0]);
        const double t2 = 0.5 * (cube.lo[1] + cube.hi[1]);
        starts_.clear();
        ends_.clear();
        for (const auto& [ru, rv] : rings_) {
            Interval pa[2], pb[2], parts[4];
            const int na = parts_at(pa, ru, t1, t2);
            if (na == 0 && !union_mode_) continue;
            const int nb = parts_at(pb, rv, t1, t2);
            const int np = combine(parts, pa, na, pb, nb);
            for (int k = 0; k < np; ++k) {
                starts_.push_back(parts[k].lo);
                ends_.push_back(parts[k].hi);
            }
        }
        const StabResult s = stab_sorted(starts_, ends_);
        return {s.count, {t1, t2, s.count > 0 ? s.stabber : 0.0}};
    }

    int upper(const Cube& cube) const {
        grid_.clear();
        for (const auto& [ru, rv] : rings_) {
            Interval pa[2], pb[2], parts[4];
            const int na = parts_over(pa, ru, cube);
            if (na == 0 && !union_mode_) continue;
            const int nb = parts_over(pb, rv, cube);
            const int np = combine(parts, pa, na, pb, nb);
            for (int k = 0; k < np; ++k) grid_.mark(parts[k].lo, parts[k].hi);
        }
        return grid_.peak();
    }

  private:
    static int parts_at(Interval out[2], const detail::Ring& r, double t1, double t2) {
        const double e1 = r.p.x() + t1;
        const double e2 = r.p.y() + t2;
        const double h1 = e1 * e1 + e2 * e2;
        return detail::ring_parts(out, r.p.z(), r.c1 - h1, r.c2 - h1);
    }

    static int parts_over(Interval out[2], const detail::Ring& r, const Cube& cube) {
        const double ax = r.p.x() + cube.lo[0], bx = r.p.x() + cube.hi[0];
        const double ay = r.p.y() + cube.lo[1], by = r.p.y() + cube.hi[1];
        const double ax2 = ax * ax, bx2 = bx * bx;
        const double ay2 = ay * ay, by2 = by * by;
        const double h1_lo = (ax <= 0.0 && bx >= 0.0 ? 0.0 : std::min(ax2, bx2)) +
                             (ay <= 0.0 && by >= 0.0 ? 0.0 : std::min(ay2, by2));
        const double h1_hi = std::max(ax2, bx2) + std::max(ay2, by2);
        return detail::ring_parts(out, r.p.z(), r.c1 - h1_hi, r.c2 - h1_lo);
    }

    // The pair's feasible set as disjoint ascending parts, so it counts once
    // per stab: the intersection of the two sorted part lists, or their
    // coalesced union.
    int combine(Interval out[4], const Interval pa[2], int na, const Interval pb[2],
                int nb) const {
        int nm = 0;
        if (!union_mode_) {
            int i = 0, j = 0;
            while (i < na && j < nb) {
                const double lo = std::max(pa[i].lo, pb[j].lo);
                const double hi = std::min(pa[i].hi, pb[j].hi);
                if (lo <= hi) out[nm++] = {lo, hi};
                if (pa[i].hi < pb[j].hi)
                    ++i;
                else
                    ++j;
            }
            return nm;
        }
        int i = 0, j = 0;
        while (i < na || j < nb) {
            const Interval& next =
                (j >= nb || (i < na && pa[i].lo <= pb[j].lo)) ? pa[i++] : pb[j++];
            if (nm > 0 && next.lo <= out[nm - 1].hi)
                out[nm - 1].hi = std::max(out[nm - 1].hi, next.hi);
            else
                out[nm++] = next;
        }
        return nm;
    }

    std::vector<std::pair<detail::Ring, detail::Ring>> rings_;
    bool union_mode_;
    // Scratch reused across bound evaluations; a bounder instance is
    // therefore not safe for concurrent evaluation.
    detail::CoverageGrid grid_;
    mutable std::vector<double> starts_, ends_;
};

/**
 * Componentwise translation box [min(q) - max(p), max(q) - min(p)] padded by
 * eps. `dims` selects how many leading coordinates to keep.
 */
inline Cube default_translation_cube(const std::vector<Eigen::Vector3d>& pset,
                                     const std::vector<Eigen::Vector3d>& qset, double eps,
                                     std::size_t dims = 3) {
    Eigen::Vector3d pmin = pset.front(), pmax = pset.front();
    for (const Eigen::Vector3d& p : pset) {
        pmin = pmin.cwiseMin(p);
        pmax = pmax.cwiseMax(p);
    }
    Eigen::Vector3d qmin = qset.front(), qmax = qset.front();
    for (const Eigen::Vector3d& q : qset) {
        qmin = qmin.cwiseMin(q);
        qmax = qmax.cwiseMax(q);
    }
    Cube cube;
    for (std::size_t k = 0; k < dims; ++k) {
        cube.lo.push_back(qmin[static_cast<int>(k)] - pmax[static_cast<int>(k)] - eps);
        cube.hi.push_back(qmax[static_cast<int>(k)] - pmin[static_cast<int>(k)] + eps);
    }
    return cube;
}

}  // namespace acm
