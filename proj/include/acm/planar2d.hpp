#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

#include "acm/engine.hpp"
#include "acm/interval.hpp"

namespace acm {

/** Normalized image correspondence between two views. */
struct Corr2D2D {
    Eigen::Vector2d x1;
    Eigen::Vector2d x2;
};

/**
 * Epipolar constraint of planar motion in separated form
 * g(t1, t2) = A1*sin(t1 + phi1) + A2*sin(t2 + phi2), where t1 is the yaw
 * minus the translation bearing and t2 is the translation bearing. Both
 * amplitudes are nonnegative.
 */
struct PlanarConstraint {
    double a1 = 0.0;
    double phi1 = 0.0;
    double a2 = 0.0;
    double phi2 = 0.0;
};

inline double planar_residual(const PlanarConstraint& c, double t1, double t2) {
    return c.a1 * std::sin(t1 + c.phi1) + c.a2 * std::sin(t2 + c.phi2);
}

inline PlanarConstraint build_planar(const Corr2D2D& corr) {
    const double u1 = corr.x1.x(), v1 = corr.x1.y();
    const double u2 = corr.x2.x(), v2 = corr.x2.y();
    const double s1 = -v1, c1 = -u2 * v1;
    const double s2 = -v2, c2 = u1 * v2;
    PlanarConstraint out;
    out.a1 = std::hypot(s1, c1);
    out.phi1 = out.a1 > 0.0 ? std::atan2(c1, s1) : 0.0;
    out.a2 = std::hypot(s2, c2);
    out.phi2 = out.a2 > 0.0 ? std::atan2(c2, s2) : 0.0;
    return out;
}

inline std::vector<PlanarConstraint> build_planar_all(const std::vector<Corr2D2D>& corrs) {
    std::vector<PlanarConstraint> out;
    out.reserve(corrs.size());
    for (const Corr2D2D& c : corrs) out.push_back(build_planar(c));
    return out;
}

/** Interval bounds over a 2D angle box for the plain search. */
class Plain2dBounder {
  public:
    Plain2dBounder(std::vector<PlanarConstraint> constraints, double eps)
        : constraints_(std::move(constraints)), eps_(eps) {}

    std::size_t branch_dims() const { return 2; }

    LowerEval lower(const Cube& cube) const {
        const double t1 = 0.5 * (cube.lo[0] + cube.hi[0]);
        const double t2 = 0.5 * (cube.lo[1] + cube.hi[1]);
        int count = 0;
        for (const PlanarConstraint& c : constraints_)
            if (std::abs(planar_residual(c, t1, t2)) <= eps_) ++count;
        return {count, {t1, t2}};
    }

    int upper(const Cube& cube) const {
        int count = 0;
        for (const PlanarConstraint& c : constraints_) {
            const Interval s1 = sin_range({cube.lo[0] + c.phi1, cube.hi[0] + c.phi1});
            const Interval s2 = sin_range({cube.lo[1] + c.phi2, cube.hi[1] + c.phi2});
            const double glo = c.a1 * s1.lo + c.a2 * s2.lo;
            const double ghi = c.a1 * s1.hi + c.a2 * s2.hi;
            if (glo <= eps_ && ghi >= -eps_) ++count;
        }
        return count;
    }

  private:
    std::vector<PlanarConstraint> constraints_;
    double eps_;
};

/**
 * Accelerated bounds: branch over t1 only and solve t2 exactly by interval
 * stabbing over [-pi, pi].
 */
class Acm1Bounder {
  public:
    Acm1Bounder(std::vector<PlanarConstraint> constraints, double eps)
        : constraints_(std::move(constraints)), eps_(eps) {}

    std::size_t branch_dims() const { return 1; }

    LowerEval lower(const Cube& cube) const {
        const double t1 = 0.5 * (cube.lo[0] + cube.hi[0]);
        std::vector<IntervalSet> sets;
        sets.reserve(constraints_.size());
        for (const PlanarConstraint& c : constraints_) {
            const double k = c.a1 * std::sin(t1 + c.phi1);
            sets.push_back(solve_sinusoid_leq(c.a2 * std::cos(c.phi2), c.a2 * std::sin(c.phi2), k,
                                              -eps_, eps_));
        }
        const StabResult r = stab_sets(sets);
        return {r.count, {t1, r.count > 0 ? r.stabber : 0.0}};
    }

    int upper(const Cube& cube) const {
        std::vector<IntervalSet> sets;
        sets.reserve(constraints_.size());
        for (const PlanarConstraint& c : constraints_) {
            const Interval s1 = sin_range({cube.lo[0] + c.phi1, cube.hi[0] + c.phi1});
            const double klo = c.a1 * s1.lo;
            const double khi = c.a1 * s1.hi;
            sets.push_back(solve_sinusoid_leq(c.a2 * std::cos(c.phi2), c.a2 * std::sin(c.phi2),
                                              0.0, -eps_ - khi, eps_ - klo));
        }
        return stab_sets(sets).count;
    }

  private:
    std::vector<PlanarConstraint> constraints_;
    double eps_;
};

/** Plain best-first search over the angle box (default [-pi/2, pi/2]^2). */
inline SolveReport solve_planar_plain(const std::vector<PlanarConstraint>& constraints, double eps,
                                      const SolveOptions& opts = {},
                                      const Interval& domain = {-0.5 * kPi, 0.5 * kPi}) {
    Plain2dBounder bounder(constraints, eps);
    Cube initial{{domain.lo, domain.lo}, {domain.hi, domain.hi}, 0};
    return solve(bounder, std::move(initial), opts);
}

/** Accelerated search branching t1 over the given domain. */
inline SolveReport solve_planar_acm1(const std::vector<PlanarConstraint>& constraints, double eps,
                                     const SolveOptions& opts = {},
                                     const Interval& domain = {-0.5 * kPi, 0.5 * kPi}) {
    Acm1Bounder bounder(constraints, eps);
    Cube initial{{domain.lo}, {domain.hi}, 0};
    return solve(bounder, std::move(initial), opts);
}

}  // namespace acm
