#include <Eigen/Dense>
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "acm/datagen.hpp"
#include "acm/planar2d.hpp"
#include "acm/rng.hpp"

namespace {

// Epipolar residual written directly from the image coordinates, without the
// amplitude/phase form.
double direct_residual(const acm::Corr2D2D& c, double t1, double t2) {
    const double u1 = c.x1.x(), v1 = c.x1.y();
    const double u2 = c.x2.x(), v2 = c.x2.y();
    return u1 * v2 * std::cos(t2) - v2 * std::sin(t2) - u2 * v1 * std::cos(t1) -
           v1 * std::sin(t1);
}

int count_at(const std::vector<acm::PlanarConstraint>& cons, double t1, double t2, double eps) {
    int count = 0;
    for (const acm::PlanarConstraint& c : cons)
        if (std::abs(acm::planar_residual(c, t1, t2)) <= eps) ++count;
    return count;
}

}  // namespace

TEST_CASE("separated form equals the direct epipolar residual", "[planar2d]") {
    acm::Rng rng(8201);
    for (int trial = 0; trial < 200; ++trial) {
        acm::Corr2D2D c;
        c.x1 = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        c.x2 = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        const acm::PlanarConstraint pc = acm::build_planar(c);
        CHECK(pc.a1 >= 0.0);
        CHECK(pc.a2 >= 0.0);
        for (int k = 0; k < 10; ++k) {
            const double t1 = rng.uniform(-acm::kPi, acm::kPi);
            const double t2 = rng.uniform(-acm::kPi, acm::kPi);
            CHECK(acm::planar_residual(pc, t1, t2) ==
                  Catch::Approx(direct_residual(c, t1, t2)).margin(1e-12));
        }
    }
}

TEST_CASE("constraint vanishes at the ground-truth decomposition", "[planar2d]") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        acm::SceneConfig cfg;
        cfg.seed = seed;
        cfg.n_points = 30;
        cfg.noise_px = 0.0;
        cfg.outlier_ratio = 0.0;
        const acm::PlanarInstance inst = acm::gen_planar(cfg);
        const double t1 = inst.theta_gt - inst.phi_gt;
        const double t2 = inst.phi_gt;
        for (const acm::Corr2D2D& c : inst.corrs) {
            const acm::PlanarConstraint pc = acm::build_planar(c);
            CHECK(std::abs(acm::planar_residual(pc, t1, t2)) <= 1e-9);
        }
    }
}

TEST_CASE("flipping the bearing by pi negates the residual", "[planar2d]") {
    acm::Rng rng(8202);
    for (int trial = 0; trial < 100; ++trial) {
        acm::PlanarConstraint c;
        c.a1 = rng.uniform(0.0, 2.0);
        c.phi1 = rng.uniform(-acm::kPi, acm::kPi);
        c.a2 = rng.uniform(0.0, 2.0);
        c.phi2 = rng.uniform(-acm::kPi, acm::kPi);
        const double t1 = rng.uniform(-acm::kPi, acm::kPi);
        const double t2 = rng.uniform(-acm::kPi, acm::kPi);
        const double a = acm::planar_residual(c, t1, t2);
        const double b = acm::planar_residual(c, t1 - acm::kPi, t2 + acm::kPi);
        CHECK(a == Catch::Approx(-b).margin(1e-12));
    }
}

TEST_CASE("plain 2d bounds dominate sampled counts", "[planar2d]") {
    acm::Rng rng(8203);
    acm::SceneConfig cfg;
    cfg.seed = 42;
    cfg.n_points = 40;
    cfg.outlier_ratio = 0.4;
    const acm::PlanarInstance inst = acm::gen_planar(cfg);
    const std::vector<acm::PlanarConstraint> cons = acm::build_planar_all(inst.corrs);
    const double eps = 0.02;
    const acm::Plain2dBounder bounder(cons, eps);
    for (int trial = 0; trial < 100; ++trial) {
        acm::Cube cube;
        for (int i = 0; i < 2; ++i) {
            const double lo = rng.uniform(-1.5, 1.0);
            cube.lo.push_back(lo);
            cube.hi.push_back(lo + rng.uniform(0.01, 0.5));
        }
        const int up = bounder.upper(cube);
        const acm::LowerEval low = bounder.lower(cube);
        CHECK(low.count <= up);
        CHECK(low.count == count_at(cons, low.witness[0], low.witness[1], eps));
        for (int k = 0; k < 30; ++k) {
            const double t1 = rng.uniform(cube.lo[0], cube.hi[0]);
            const double t2 = rng.uniform(cube.lo[1], cube.hi[1]);
            CHECK(count_at(cons, t1, t2, eps) <= up);
        }
    }
}

TEST_CASE("accelerated lower bound is the exact slice optimum", "[planar2d]") {
    acm::Rng rng(8204);
    acm::SceneConfig cfg;
    cfg.seed = 43;
    cfg.n_points = 40;
    cfg.outlier_ratio = 0.3;
    const acm::PlanarInstance inst = acm::gen_planar(cfg);
    const std::vector<acm::PlanarConstraint> cons = acm::build_planar_all(inst.corrs);
    const double eps = 0.02;
    const acm::Acm1Bounder bounder(cons, eps);
    for (int trial = 0; trial < 60; ++trial) {
        const double lo = rng.uniform(-1.5, 1.4);
        const acm::Cube cube{{lo}, {lo + rng.uniform(0.01, 0.3)}, 0};
        const acm::LowerEval low = bounder.lower(cube);
        const double t1 = low.witness[0];
        CHECK(t1 == Catch::Approx(0.5 * (cube.lo[0] + cube.hi[0])));
        if (low.count > 0)
            CHECK(count_at(cons, t1, low.witness[1], eps) == low.count);
        int grid_best = 0;
        for (int k = 0; k <= 2000; ++k) {
            const double t2 = -acm::kPi + 2.0 * acm::kPi * k / 2000.0;
            grid_best = std::max(grid_best, count_at(cons, t1, t2, eps));
        }
        CHECK(low.count >= grid_best);
    }
}

TEST_CASE("accelerated upper bound dominates sampled slice counts", "[planar2d]") {
    acm::Rng rng(8205);
    acm::SceneConfig cfg;
    cfg.seed = 44;
    cfg.n_points = 30;
    cfg.outlier_ratio = 0.3;
    const acm::PlanarInstance inst = acm::gen_planar(cfg);
    const std::vector<acm::PlanarConstraint> cons = acm::build_planar_all(inst.corrs);
    const double eps = 0.02;
    const acm::Acm1Bounder bounder(cons, eps);
    for (int trial = 0; trial < 60; ++trial) {
        const double lo = rng.uniform(-1.5, 1.4);
        const acm::Cube cube{{lo}, {lo + rng.uniform(0.01, 0.3)}, 0};
        const int up = bounder.upper(cube);
        for (int k = 0; k < 40; ++k) {
            const double t1 = rng.uniform(cube.lo[0], cube.hi[0]);
            const double t2 = rng.uniform(-acm::kPi, acm::kPi);
            CHECK(count_at(cons, t1, t2, eps) <= up);
        }
    }
}

TEST_CASE("plain and accelerated searches agree on clean instances", "[planar2d]") {
    for (std::uint64_t seed = 60; seed < 66; ++seed) {
        acm::SceneConfig cfg;
        cfg.seed = seed;
        cfg.n_points = 40;
        cfg.noise_px = 0.0;
        cfg.outlier_ratio = 0.0;
        cfg.yaw_range = acm::kPi / 6.0;
        cfg.bearing_range = acm::kPi / 6.0;
        const acm::PlanarInstance inst = acm::gen_planar(cfg);
        const std::vector<acm::PlanarConstraint> cons = acm::build_planar_all(inst.corrs);
        const double eps = 0.01;
        const acm::SolveReport plain = acm::solve_planar_plain(cons, eps);
        const acm::SolveReport fast = acm::solve_planar_acm1(cons, eps);
        CHECK(plain.best_count == static_cast<int>(cons.size()));
        CHECK(fast.best_count == static_cast<int>(cons.size()));
        CHECK(fast.iterations <= plain.iterations);
    }
}
