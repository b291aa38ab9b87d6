#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

#include "acm/engine.hpp"
#include "acm/geometry.hpp"
#include "acm/interval.hpp"

namespace acm {

/** 3D point observed at a normalized image location. */
struct Corr3D2D {
    Eigen::Vector3d p;
    Eigen::Vector2d u;
};

/** Known pitch/roll, leaving yaw as the only rotation unknown. */
struct ImuPrior {
    double pitch = 0.0;  // rotation about y
    double roll = 0.0;   // rotation about x
};

/**
 * Translation-free pairwise constraint d1*sin(a) + d2*cos(a) + d3 = 0 on the
 * yaw angle, obtained by eliminating the translation from the projection
 * equations of two correspondences.
 */
struct TimConstraint {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0;
};

inline double tim_residual(const TimConstraint& c, double alpha) {
    return c.d1 * std::sin(alpha) + c.d2 * std::cos(alpha) + c.d3;
}

/**
 * Eliminates t from the projections of two correspondences under
 * R = Rz(alpha) * Ry(pitch) * Rx(roll). Returns nothing when the pair is
 * degenerate (identical image points make the elimination rank-deficient).
 */
inline std::optional<TimConstraint> build_tim(const Corr3D2D& ci, const Corr3D2D& cj,
                                              const ImuPrior& prior) {
    const Eigen::Matrix3d ryx = rot_y(prior.pitch) * rot_x(prior.roll);
    const Eigen::Vector3d m1 = ryx.row(0);
    const Eigen::Vector3d m2 = ryx.row(1);
    const Eigen::Vector3d m3 = ryx.row(2);

    const double du1 = ci.u.x() - cj.u.x();
    const double du2 = ci.u.y() - cj.u.y();
    if (std::abs(du1) + std::abs(du2) < 1e-12) return std::nullopt;

    const Eigen::Vector3d dp = ci.p - cj.p;
    const double a1 = m1.dot(dp);
    const double a2 = m2.dot(dp);
    const double ka = ci.u.x() * m3.dot(ci.p) - cj.u.x() * m3.dot(cj.p);
    const double kb = ci.u.y() * m3.dot(ci.p) - cj.u.y() * m3.dot(cj.p);

    TimConstraint c;
    c.d1 = -(a1 * du1 + a2 * du2);
    c.d2 = a1 * du2 - a2 * du1;
    c.d3 = kb * du1 - ka * du2;
    return c;
}

/** Constraints from consecutive correspondence pairs (i, i+1). */
inline std::vector<TimConstraint> build_tims(const std::vector<Corr3D2D>& corrs,
                                             const ImuPrior& prior) {
    std::vector<TimConstraint> out;
    if (corrs.size() < 2) return out;
    out.reserve(corrs.size() - 1);
    for (std::size_t i = 0; i + 1 < corrs.size(); ++i)
        if (auto c = build_tim(corrs[i], corrs[i + 1], prior)) out.push_back(*c);
    return out;
}

/** Yaw values satisfying |residual| <= eps, as a subset of [-pi, pi]. */
inline IntervalSet tim_feasible_set(const TimConstraint& c, double eps) {
    return solve_sinusoid_leq(c.d1, c.d2, c.d3, -eps, eps);
}

struct Acm0Result {
    double alpha = 0.0;
    int count = 0;
};

/**
 * Globally optimal yaw in a single interval-stabbing pass: invert each
 * constraint into its feasible yaw set and stab the union.
 */
inline Acm0Result solve_acm0(const std::vector<TimConstraint>& constraints, double eps) {
    std::vector<IntervalSet> sets;
    sets.reserve(constraints.size());
    for (const TimConstraint& c : constraints) sets.push_back(tim_feasible_set(c, eps));
    const StabResult r = stab_sets(sets);
    Acm0Result out;
    out.count = r.count;
    out.alpha = r.count > 0 ? r.stabber : 0.0;
    return out;
}

/** Interval bounds over a yaw arc for the plain one-dimensional search. */
class Plain1dBounder {
  public:
    Plain1dBounder(std::vector<TimConstraint> constraints, double eps)
        : constraints_(std::move(constraints)), eps_(eps) {}

    std::size_t branch_dims() const { return 1; }

    LowerEval lower(const Cube& cube) const {
        const double a = 0.5 * (cube.lo[0] + cube.hi[0]);
        int count = 0;
        for (const TimConstraint& c : constraints_)
            if (std::abs(tim_residual(c, a)) <= eps_) ++count;
        return {count, {a}};
    }

    int upper(const Cube& cube) const {
        int count = 0;
        for (const TimConstraint& c : constraints_) {
            const double amp = std::hypot(c.d1, c.d2);
            const double beta = std::atan2(c.d1, c.d2);
            const Interval arc{cube.lo[0] - beta, cube.hi[0] - beta};
            const Interval cr = cos_range(arc);
            const double flo = amp * cr.lo + c.d3;
            const double fhi = amp * cr.hi + c.d3;
            if (flo <= eps_ && fhi >= -eps_) ++count;
        }
        return count;
    }

  private:
    std::vector<TimConstraint> constraints_;
    double eps_;
};

/** Plain best-first search over yaw in [-pi, pi]. */
inline SolveReport solve_plain1d(const std::vector<TimConstraint>& constraints, double eps,
                                 const SolveOptions& opts = {}) {
    Plain1dBounder bounder(constraints, eps);
    Cube initial{{-kPi}, {kPi}, 0};
    return solve(bounder, std::move(initial), opts);
}

}  // namespace acm
