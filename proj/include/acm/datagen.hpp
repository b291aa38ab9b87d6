#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "acm/geometry.hpp"
#include "acm/planar2d.hpp"
#include "acm/reg3d.hpp"
#include "acm/resection1d.hpp"
#include "acm/rng.hpp"

namespace acm {

/**
 * Synthetic scene parameters. noise_px perturbs bearing vectors in pixels at
 * the given focal length; noise_sigma is the per-coordinate Gaussian noise
 * of 3D points. Angles are sampled uniformly from symmetric ranges.
 */
struct SceneConfig {
    int n_points = 200;
    double outlier_ratio = 0.0;
    std::uint64_t seed = 0;

    double noise_px = 2.0;
    double focal = 800.0;
    double noise_sigma = 0.1;

    double angle_range = 0.5 * kPi;    // resectioning yaw/pitch/roll
    double yaw_range = kPi / 3.0;      // planar yaw
    double bearing_range = kPi / 3.0;  // planar translation direction
    double rho_range = 2.0;            // planar translation magnitude
};

struct ResectionInstance {
    std::vector<Corr3D2D> corrs;
    ImuPrior prior;
    double alpha_gt = 0.0;
    Eigen::Vector3d t_gt = Eigen::Vector3d::Zero();
    std::vector<char> inlier_mask;
};

struct PlanarInstance {
    std::vector<Corr2D2D> corrs;
    double theta_gt = 0.0;
    double phi_gt = 0.0;
    double rho_gt = 0.0;
    std::vector<char> inlier_mask;
};

struct Reg3dCorrInstance {
    std::vector<Corr3D3D> corrs;
    Eigen::Matrix3d r_gt = Eigen::Matrix3d::Identity();
    Eigen::Vector3d t_gt = Eigen::Vector3d::Zero();
    std::vector<char> inlier_mask;
};

struct CorrlessInstance {
    std::vector<Eigen::Vector3d> pset;
    std::vector<Eigen::Vector3d> qset;
    Eigen::Matrix3d r_gt = Eigen::Matrix3d::Identity();
    Eigen::Vector3d t_gt = Eigen::Vector3d::Zero();
    double overlap = 1.0;
};

namespace detail {

inline Eigen::Vector3d sample_scene_point(Rng& rng) {
    return {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(4.0, 8.0)};
}

/** Perturbs a bearing on its orthogonal plane by uniform pixel noise. */
inline Eigen::Vector3d perturb_bearing(const Eigen::Vector3d& x, double noise_px, double focal,
                                       Rng& rng) {
    const Eigen::Vector3d f = x.normalized();
    Eigen::Vector3d ref = Eigen::Vector3d::UnitZ();
    if (std::abs(f.z()) > 0.9) ref = Eigen::Vector3d::UnitX();
    const Eigen::Vector3d e1 = f.cross(ref).normalized();
    const Eigen::Vector3d e2 = f.cross(e1).normalized();
    const double d1 = rng.uniform(-noise_px, noise_px);
    const double d2 = rng.uniform(-noise_px, noise_px);
    return (f + (d1 * e1 + d2 * e2) / focal).normalized();
}

inline Eigen::Vector2d project_noisy(const Eigen::Vector3d& x, double noise_px, double focal,
                                     Rng& rng) {
    const Eigen::Vector3d f = perturb_bearing(x, noise_px, focal, rng);
    return {f.x() / f.z(), f.y() / f.z()};
}

/** Indices marked as outliers, exactly n - round((1 - ratio) * n) of them. */
inline std::vector<char> make_inlier_mask(int n, double outlier_ratio, Rng& rng) {
    const int n_in = static_cast<int>(std::lround((1.0 - outlier_ratio) * n));
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    std::vector<char> mask(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n_in; ++i) mask[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = 1;
    return mask;
}

}  // namespace detail

/**
 * Camera resectioning scene: 3D points in [-1,1]^2 x [4,8], rotation angles
 * uniform in the configured range, translation in [-1,1]^3. Outliers replace
 * the image observation with that of a freshly sampled point.
 */
inline ResectionInstance gen_resection(const SceneConfig& cfg) {
    Rng base(cfg.seed);
    Rng motion = base.stream(0);
    Rng points = base.stream(1);
    Rng noise = base.stream(2);
    Rng outliers = base.stream(3);

    ResectionInstance inst;
    Eigen::Matrix3d r;
    // Redraw poses that leave the scene box behind the camera; keeping the box
    // center well in front makes every later visibility draw succeed with
    // probability at least one half.
    do {
        inst.alpha_gt = motion.uniform(-cfg.angle_range, cfg.angle_range);
        inst.prior.pitch = motion.uniform(-cfg.angle_range, cfg.angle_range);
        inst.prior.roll = motion.uniform(-cfg.angle_range, cfg.angle_range);
        inst.t_gt = {motion.uniform(-1.0, 1.0), motion.uniform(-1.0, 1.0),
                     motion.uniform(-1.0, 1.0)};
        r = rot_z(inst.alpha_gt) * rot_y(inst.prior.pitch) * rot_x(inst.prior.roll);
    } while ((r * Eigen::Vector3d(0.0, 0.0, 6.0) + inst.t_gt).z() <= 2.0);

    auto sample_visible = [&](Rng& rng) {
        while (true) {
            const Eigen::Vector3d p = detail::sample_scene_point(rng);
            if ((r * p + inst.t_gt).z() > 0.5) return p;
        }
    };

    inst.inlier_mask = detail::make_inlier_mask(cfg.n_points, cfg.outlier_ratio, outliers);
    inst.corrs.reserve(static_cast<std::size_t>(cfg.n_points));
    for (int i = 0; i < cfg.n_points; ++i) {
        Corr3D2D c;
        c.p = sample_visible(points);
        const Eigen::Vector3d seen =
            inst.inlier_mask[static_cast<std::size_t>(i)] ? c.p : sample_visible(outliers);
        c.u = detail::project_noisy(r * seen + inst.t_gt, cfg.noise_px, cfg.focal, noise);
        inst.corrs.push_back(c);
    }
    return inst;
}

/**
 * Planar relative pose scene: yaw about the y axis and an in-plane
 * translation of bearing phi and magnitude rho. View-2 points follow the
 * resectioning distribution; outliers replace the view-1 observation.
 */
inline PlanarInstance gen_planar(const SceneConfig& cfg) {
    Rng base(cfg.seed);
    Rng motion = base.stream(0);
    Rng points = base.stream(1);
    Rng noise = base.stream(2);
    Rng outliers = base.stream(3);

    PlanarInstance inst;
    Eigen::Matrix3d r;
    Eigen::Vector3d t;
    // Same pose-feasibility redraw as in gen_resection, for the first view.
    do {
        inst.theta_gt = motion.uniform(-cfg.yaw_range, cfg.yaw_range);
        inst.phi_gt = motion.uniform(-cfg.bearing_range, cfg.bearing_range);
        inst.rho_gt = motion.uniform(-cfg.rho_range, cfg.rho_range);
        r = rot_y(inst.theta_gt);
        t = inst.rho_gt * Eigen::Vector3d(std::sin(inst.phi_gt), 0.0, std::cos(inst.phi_gt));
    } while ((r * Eigen::Vector3d(0.0, 0.0, 6.0) + t).z() <= 2.0);

    auto sample_visible = [&](Rng& rng) {
        while (true) {
            const Eigen::Vector3d p = detail::sample_scene_point(rng);
            if ((r * p + t).z() > 0.5) return p;
        }
    };

    inst.inlier_mask = detail::make_inlier_mask(cfg.n_points, cfg.outlier_ratio, outliers);
    inst.corrs.reserve(static_cast<std::size_t>(cfg.n_points));
    for (int i = 0; i < cfg.n_points; ++i) {
        const Eigen::Vector3d x2 = sample_visible(points);
        const Eigen::Vector3d seen =
            inst.inlier_mask[static_cast<std::size_t>(i)] ? x2 : sample_visible(outliers);
        Corr2D2D c;
        c.x2 = detail::project_noisy(x2, cfg.noise_px, cfg.focal, noise);
        c.x1 = detail::project_noisy(r * seen + t, cfg.noise_px, cfg.focal, noise);
        inst.corrs.push_back(c);
    }
    return inst;
}

/**
 * Matched 3D registration scene: rotation axis uniform in the unit cube
 * (normalized), angle uniform in [-pi, pi], translation in the unit cube,
 * Gaussian noise on the points of both frames. Outliers replace q with the
 * transform of a freshly sampled point.
 */
inline Reg3dCorrInstance gen_reg3d_corr(const SceneConfig& cfg) {
    Rng base(cfg.seed);
    Rng motion = base.stream(0);
    Rng points = base.stream(1);
    Rng noise = base.stream(2);
    Rng outliers = base.stream(3);

    Reg3dCorrInstance inst;
    const Eigen::Vector3d axis(motion.uniform(0.0, 1.0), motion.uniform(0.0, 1.0),
                               motion.uniform(0.0, 1.0));
    inst.r_gt = axis_angle(axis, motion.uniform(-kPi, kPi));
    inst.t_gt = {motion.uniform(0.0, 1.0), motion.uniform(0.0, 1.0), motion.uniform(0.0, 1.0)};

    auto gauss3 = [&noise](double sigma) {
        return Eigen::Vector3d(noise.normal(0.0, sigma), noise.normal(0.0, sigma),
                               noise.normal(0.0, sigma));
    };

    inst.inlier_mask = detail::make_inlier_mask(cfg.n_points, cfg.outlier_ratio, outliers);
    inst.corrs.reserve(static_cast<std::size_t>(cfg.n_points));
    for (int i = 0; i < cfg.n_points; ++i) {
        Corr3D3D c;
        const Eigen::Vector3d p = detail::sample_scene_point(points);
        const Eigen::Vector3d seen =
            inst.inlier_mask[static_cast<std::size_t>(i)] ? p : detail::sample_scene_point(outliers);
        c.p = p + gauss3(cfg.noise_sigma);
        c.q = inst.r_gt * (seen + inst.t_gt) + gauss3(cfg.noise_sigma);
        inst.corrs.push_back(c);
    }
    return inst;
}

/** Subset of points on the far side of a random half-space cut through the
 * fraction quantile. */
inline std::vector<Eigen::Vector3d> crop_halfspace(const std::vector<Eigen::Vector3d>& points,
                                                   double fraction, Rng& rng) {
    Eigen::Vector3d w(rng.normal(), rng.normal(), rng.normal());
    if (w.norm() < 1e-9) w = Eigen::Vector3d::UnitZ();
    w.normalize();
    std::vector<std::size_t> idx(points.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const double da = w.dot(points[a]);
        const double db = w.dot(points[b]);
        if (da != db) return da > db;
        return a < b;
    });
    const std::size_t k =
        static_cast<std::size_t>(std::lround(fraction * static_cast<double>(points.size())));
    std::vector<Eigen::Vector3d> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && i < idx.size(); ++i) out.push_back(points[idx[i]]);
    return out;
}

/**
 * Correspondence-less registration scene: Q holds the transform of a
 * half-space crop of P covering the requested overlap fraction, topped up
 * with filler points in the bounding box of the transformed set so that both
 * sets have equal size. Points are noiseless.
 */
inline CorrlessInstance gen_reg3d_corrless(const SceneConfig& cfg, double overlap) {
    Rng base(cfg.seed);
    Rng motion = base.stream(0);
    Rng points = base.stream(1);
    Rng crop = base.stream(2);
    Rng filler = base.stream(3);

    CorrlessInstance inst;
    const Eigen::Vector3d axis(motion.uniform(0.0, 1.0), motion.uniform(0.0, 1.0),
                               motion.uniform(0.0, 1.0));
    inst.r_gt = axis_angle(axis, motion.uniform(-kPi, kPi));
    inst.t_gt = {motion.uniform(0.0, 1.0), motion.uniform(0.0, 1.0), motion.uniform(0.0, 1.0)};

    inst.pset.reserve(static_cast<std::size_t>(cfg.n_points));
    for (int i = 0; i < cfg.n_points; ++i) inst.pset.push_back(detail::sample_scene_point(points));

    const std::vector<Eigen::Vector3d> fragment = crop_halfspace(inst.pset, overlap, crop);
    inst.overlap = static_cast<double>(fragment.size()) / static_cast<double>(inst.pset.size());

    Eigen::Vector3d bmin = inst.r_gt * (inst.pset.front() + inst.t_gt);
    Eigen::Vector3d bmax = bmin;
    for (const Eigen::Vector3d& p : inst.pset) {
        const Eigen::Vector3d q = inst.r_gt * (p + inst.t_gt);
        bmin = bmin.cwiseMin(q);
        bmax = bmax.cwiseMax(q);
    }

    inst.qset.reserve(inst.pset.size());
    for (const Eigen::Vector3d& p : fragment) inst.qset.push_back(inst.r_gt * (p + inst.t_gt));
    while (inst.qset.size() < inst.pset.size())
        inst.qset.push_back({filler.uniform(bmin.x(), bmax.x()), filler.uniform(bmin.y(), bmax.y()),
                             filler.uniform(bmin.z(), bmax.z())});
    filler.shuffle(inst.qset);
    return inst;
}

}  // namespace acm
