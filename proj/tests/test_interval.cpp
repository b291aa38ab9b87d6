#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "acm/interval.hpp"
#include "acm/rng.hpp"
#include "helpers.hpp"

using acm::Interval;
using acm::IntervalSet;
using acm::kPi;

TEST_CASE("interval arithmetic on fixed operands", "[interval]") {
    const Interval a{1.0, 2.0};
    const Interval b{3.0, 4.0};
    const Interval s = acm::interval_add(a, b);
    CHECK(s.lo == 4.0);
    CHECK(s.hi == 6.0);

    const Interval d = acm::interval_sub(a, b);
    CHECK(d.lo == -3.0);
    CHECK(d.hi == -1.0);

    const Interval m = acm::interval_mul({-1.0, 2.0}, b);
    CHECK(m.lo == -4.0);
    CHECK(m.hi == 8.0);

    const Interval q = acm::interval_div({6.0, 8.0}, {2.0, 4.0});
    CHECK(q.lo == 1.5);
    CHECK(q.hi == 4.0);

    const Interval mn = acm::interval_min(a, {0.0, 3.5});
    CHECK(mn.lo == 0.0);
    CHECK(mn.hi == 2.0);

    const Interval mx = acm::interval_max(a, {0.0, 3.5});
    CHECK(mx.lo == 1.0);
    CHECK(mx.hi == 3.5);

    const Interval sq = acm::interval_sq({-1.0, 2.0});
    CHECK(sq.lo == 0.0);
    CHECK(sq.hi == 4.0);

    const Interval ab = acm::interval_abs({-3.0, 1.0});
    CHECK(ab.lo == 0.0);
    CHECK(ab.hi == 3.0);

    const Interval ab2 = acm::interval_abs({-3.0, -1.0});
    CHECK(ab2.lo == 1.0);
    CHECK(ab2.hi == 3.0);
}

TEST_CASE("interval constructor validates endpoints", "[interval]") {
    CHECK_THROWS_AS(Interval(2.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Interval(0.0, std::numeric_limits<double>::infinity()),
                    std::invalid_argument);
    CHECK_THROWS_AS(acm::interval_div({1.0, 2.0}, {0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(acm::interval_div({1.0, 2.0}, {-1.0, 1.0}), std::domain_error);
}

TEST_CASE("interval arithmetic contains all pointwise results", "[interval]") {
    acm::Rng rng(7001);
    for (int trial = 0; trial < 1000; ++trial) {
        const double a = rng.uniform(-5.0, 5.0);
        const double b = rng.uniform(-5.0, 5.0);
        const double c = rng.uniform(-5.0, 5.0);
        const double d = rng.uniform(-5.0, 5.0);
        const Interval x{std::min(a, b), std::max(a, b)};
        const Interval y{std::min(c, d), std::max(c, d)};
        for (int k = 0; k < 8; ++k) {
            const double u = rng.uniform(x.lo, x.hi);
            const double v = rng.uniform(y.lo, y.hi);
            CHECK(acm::interval_add(x, y).contains(u + v));
            CHECK(acm::interval_sub(x, y).contains(u - v));
            CHECK(acm::interval_mul(x, y).contains(u * v));
            CHECK(acm::interval_sq(x).contains(u * u));
            CHECK(acm::interval_abs(x).contains(std::abs(u)));
            if (y.lo > 0.0) CHECK(acm::interval_div(x, y).contains(u / v));
        }
    }
}

TEST_CASE("squared and absolute ranges are tight", "[interval]") {
    acm::Rng rng(7002);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = rng.uniform(-4.0, 4.0);
        const double b = rng.uniform(-4.0, 4.0);
        const Interval x{std::min(a, b), std::max(a, b)};
        const Interval sq = acm::interval_sq(x);
        const Interval ab = acm::interval_abs(x);
        double lo_sq = 1e300, hi_sq = -1e300, lo_ab = 1e300, hi_ab = -1e300;
        for (int k = 0; k <= 200; ++k) {
            const double t = x.lo + x.width() * k / 200.0;
            lo_sq = std::min(lo_sq, t * t);
            hi_sq = std::max(hi_sq, t * t);
            lo_ab = std::min(lo_ab, std::abs(t));
            hi_ab = std::max(hi_ab, std::abs(t));
        }
        CHECK(sq.lo <= lo_sq + 1e-12);
        CHECK(sq.lo >= lo_sq - 1e-3);
        CHECK(sq.hi == Catch::Approx(hi_sq).margin(1e-12));
        CHECK(ab.lo <= lo_ab + 1e-12);
        CHECK(ab.hi == Catch::Approx(hi_ab).margin(1e-12));
    }
}

TEST_CASE("trigonometric ranges are exact", "[interval]") {
    acm::Rng rng(7003);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = rng.uniform(-10.0, 10.0);
        const double w = rng.uniform(0.0, 8.0);
        const Interval x{a, a + w};
        const Interval cr = acm::cos_range(x);
        const Interval sr = acm::sin_range(x);
        double clo = 1e300, chi = -1e300, slo = 1e300, shi = -1e300;
        for (int k = 0; k <= 1000; ++k) {
            const double t = x.lo + x.width() * k / 1000.0;
            clo = std::min(clo, std::cos(t));
            chi = std::max(chi, std::cos(t));
            slo = std::min(slo, std::sin(t));
            shi = std::max(shi, std::sin(t));
        }
        CHECK(cr.lo <= clo + 1e-12);
        CHECK(cr.hi >= chi - 1e-12);
        CHECK(cr.lo >= clo - 1e-5);
        CHECK(cr.hi <= chi + 1e-5);
        CHECK(sr.lo <= slo + 1e-12);
        CHECK(sr.hi >= shi - 1e-12);
        CHECK(sr.lo >= slo - 1e-5);
        CHECK(sr.hi <= shi + 1e-5);
    }
    const Interval full = acm::cos_range({0.0, 7.0});
    CHECK(full.lo == -1.0);
    CHECK(full.hi == 1.0);
}

TEST_CASE("interval set normalizes parts", "[interval]") {
    const IntervalSet s{{{3.0, 4.0}, {0.0, 1.0}, {0.5, 2.0}, {4.0, 5.0}}};
    REQUIRE(s.size() == 2);
    CHECK(s.parts()[0].lo == 0.0);
    CHECK(s.parts()[0].hi == 2.0);
    CHECK(s.parts()[1].lo == 3.0);
    CHECK(s.parts()[1].hi == 5.0);
    CHECK(s.measure() == Catch::Approx(4.0));
    CHECK(s.contains(0.0));
    CHECK(s.contains(2.0));
    CHECK(!s.contains(2.5));
    CHECK(s.contains(3.0));
    CHECK(!s.contains(5.1));
    CHECK(IntervalSet{}.empty());
}

TEST_CASE("interval set intersection", "[interval]") {
    const IntervalSet a{{{0.0, 2.0}, {4.0, 6.0}}};
    const IntervalSet b{{{1.0, 5.0}}};
    const IntervalSet c = intersect(a, b);
    REQUIRE(c.size() == 2);
    CHECK(c.parts()[0].lo == 1.0);
    CHECK(c.parts()[0].hi == 2.0);
    CHECK(c.parts()[1].lo == 4.0);
    CHECK(c.parts()[1].hi == 5.0);

    acm::Rng rng(7004);
    for (int trial = 0; trial < 300; ++trial) {
        auto random_set = [&rng]() {
            std::vector<Interval> parts;
            const int n = rng.uniform_int(0, 3);
            for (int i = 0; i < n; ++i) {
                const double lo = rng.uniform(-3.0, 3.0);
                parts.push_back({lo, lo + rng.uniform(0.0, 2.0)});
            }
            return IntervalSet{std::move(parts)};
        };
        const IntervalSet x = random_set();
        const IntervalSet y = random_set();
        const IntervalSet z = intersect(x, y);
        for (int k = 0; k < 100; ++k) {
            const double t = rng.uniform(-4.0, 4.0);
            CHECK(z.contains(t) == (x.contains(t) && y.contains(t)));
        }
    }
}

TEST_CASE("stabbing fixed examples", "[interval]") {
    const acm::StabResult a = acm::stab({{1.0, 3.0}, {2.0, 5.0}, {4.0, 6.0}});
    CHECK(a.count == 2);

    const acm::StabResult b = acm::stab({{0.0, 2.0}, {1.0, 3.0}, {2.0, 4.0}});
    CHECK(b.count == 3);
    CHECK(b.stabber == 2.0);

    CHECK(acm::stab({}).count == 0);

    const acm::StabResult touching = acm::stab({{0.0, 1.0}, {1.0, 2.0}});
    CHECK(touching.count == 2);
    CHECK(touching.stabber == 1.0);

    const acm::StabResult single = acm::stab({{-1.0, 1.0}});
    CHECK(single.count == 1);
    CHECK(single.stabber == 0.0);
}

TEST_CASE("stabbing matches quadratic oracle", "[interval]") {
    acm::Rng rng(7005);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Interval> intervals;
        const int n = rng.uniform_int(1, 50);
        for (int i = 0; i < n; ++i) {
            const double lo = rng.uniform(-10.0, 10.0);
            intervals.push_back({lo, lo + rng.uniform(0.0, 5.0)});
        }
        const acm::StabResult got = acm::stab(intervals);
        CHECK(got.count == testutil::stab_oracle(intervals));
        int at_stabber = 0;
        for (const Interval& iv : intervals)
            if (iv.contains(got.stabber)) ++at_stabber;
        CHECK(at_stabber == got.count);
    }
}

TEST_CASE("set stabbing counts each set once", "[interval]") {
    const IntervalSet a{{{0.0, 1.0}, {2.0, 3.0}}};
    const IntervalSet b{{{0.0, 3.0}}};
    const acm::StabResult r = acm::stab_sets({a, b});
    CHECK(r.count == 2);

    acm::Rng rng(7006);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<IntervalSet> sets;
        const int n = rng.uniform_int(1, 20);
        for (int i = 0; i < n; ++i) {
            std::vector<Interval> parts;
            const int m = rng.uniform_int(0, 3);
            for (int j = 0; j < m; ++j) {
                const double lo = rng.uniform(-8.0, 8.0);
                parts.push_back({lo, lo + rng.uniform(0.0, 2.0)});
            }
            sets.push_back(IntervalSet{std::move(parts)});
        }
        const acm::StabResult got = acm::stab_sets(sets);
        CHECK(got.count == testutil::stab_sets_oracle(sets));
        if (got.count > 0) {
            int at_stabber = 0;
            for (const IntervalSet& s : sets)
                if (s.contains(got.stabber)) ++at_stabber;
            CHECK(at_stabber == got.count);
        }
    }
}

TEST_CASE("sinusoid sublevel set on fixed example", "[interval]") {
    const IntervalSet s = acm::solve_sinusoid_leq(1.0, 0.0, 0.0, -0.5, 0.5);
    REQUIRE(s.size() == 3);
    CHECK(s.parts()[0].lo == Catch::Approx(-kPi).margin(1e-6));
    CHECK(s.parts()[0].hi == Catch::Approx(-5.0 * kPi / 6.0).margin(1e-6));
    CHECK(s.parts()[1].lo == Catch::Approx(-kPi / 6.0).margin(1e-6));
    CHECK(s.parts()[1].hi == Catch::Approx(kPi / 6.0).margin(1e-6));
    CHECK(s.parts()[2].lo == Catch::Approx(5.0 * kPi / 6.0).margin(1e-6));
    CHECK(s.parts()[2].hi == Catch::Approx(kPi).margin(1e-6));
}

TEST_CASE("sinusoid sublevel set degenerate coefficients", "[interval]") {
    const IntervalSet inside = acm::solve_sinusoid_leq(0.0, 0.0, 1.0, 0.5, 1.5);
    REQUIRE(inside.size() == 1);
    CHECK(inside.parts()[0].lo == -kPi);
    CHECK(inside.parts()[0].hi == kPi);
    CHECK(acm::solve_sinusoid_leq(0.0, 0.0, 1.0, 2.0, 3.0).empty());
    CHECK(acm::solve_sinusoid_leq(1.0, 1.0, 10.0, -0.5, 0.5).empty());
}

TEST_CASE("sinusoid sublevel set matches membership and sine form", "[interval]") {
    acm::Rng rng(7007);
    for (int trial = 0; trial < 2000; ++trial) {
        const double a1 = rng.uniform(-2.0, 2.0);
        const double a2 = rng.uniform(-2.0, 2.0);
        const double a3 = rng.uniform(-2.0, 2.0);
        const double m = rng.uniform(-2.0, 2.0);
        const double w = rng.uniform(0.0, 2.0);
        const double lo = m - w, hi = m + w;
        const IntervalSet got = acm::solve_sinusoid_leq(a1, a2, a3, lo, hi);

        for (int k = 0; k < 60; ++k) {
            const double x = rng.uniform(-kPi, kPi);
            const double f = a1 * std::sin(x) + a2 * std::cos(x) + a3;
            if (f > lo + 1e-9 && f < hi - 1e-9) CHECK(got.contains(x));
            if (f < lo - 1e-9 || f > hi + 1e-9) CHECK(!got.contains(x));
        }

        const IntervalSet ref = testutil::solve_sinusoid_leq_sine(a1, a2, a3, lo, hi);
        CHECK(std::abs(got.measure() - ref.measure()) < 1e-9);
        CHECK(testutil::sets_close(got, ref, 1e-7));
    }
}
