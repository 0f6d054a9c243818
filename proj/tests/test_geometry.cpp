#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "cradon/geometry.hpp"
#include "support/oracles.hpp"

using namespace cradon;
using Catch::Approx;

namespace {

Curve unit_circle() { return Curve::circle({0, 0}, 1.0); }

Curve sampled_circle(int n, bool closed = true, double arc = 2.0 * M_PI) {
    std::vector<CurveSample> samples;
    for (int i = 0; i < n; ++i) {
        const double s = arc * i / n;
        samples.push_back({s, {std::cos(s), std::sin(s)},
                           {-std::sin(s), std::cos(s)}});
    }
    return Curve::sampled(std::move(samples), closed);
}

} // namespace

TEST_CASE("ray_curve_intersections on the unit circle") {
    const Curve c = unit_circle();

    SECTION("radial ray hits normally") {
        auto hits = ray_curve_intersections(c, {{0, 0}, {1, 0}}, {0, 10});
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].t == Approx(1.0).margin(1e-12));
        CHECK(std::abs(hits[0].cos_angle) == Approx(1.0).margin(1e-12));
        CHECK(c.point(hits[0].s).x == Approx(1.0).margin(1e-12));
    }

    SECTION("offset chord") {
        auto hits = ray_curve_intersections(c, {{0, 0.5}, {1, 0}}, {0, 10});
        REQUIRE(hits.size() == 1);
        CHECK(hits[0].t == Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
        const Vec2 p = c.point(hits[0].s);
        CHECK(p.x == Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
        CHECK(p.y == Approx(0.5).margin(1e-12));
        CHECK(std::abs(hits[0].cos_angle) == Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    }

    SECTION("ray pointing away") {
        auto hits = ray_curve_intersections(c, {{3, 0}, {1, 0}}, {0, 10});
        CHECK(hits.empty());
    }

    SECTION("full line through the center yields two hits sorted by t") {
        auto hits = ray_curve_intersections(c, {{0.5, 0}, {1, 0}}, {-10, 10});
        REQUIRE(hits.size() == 2);
        CHECK(hits[0].t < hits[1].t);
        CHECK(hits[0].t == Approx(-1.5).margin(1e-12));
        CHECK(hits[1].t == Approx(0.5).margin(1e-12));
    }

    SECTION("degenerate curve is rejected") {
        CHECK_THROWS_AS(Curve::circle({0, 0}, 0.0), invalid_input_error);
        CHECK_THROWS_AS(Curve::sampled({{0.0, {1, 0}, {0, 1}}}),
                        invalid_input_error);
    }
}

TEST_CASE("ray_curve_intersections on a sampled circle agrees with the analytic one") {
    const Curve fine = sampled_circle(2048);
    const Curve exact = unit_circle();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.6, 0.6);
    for (int rep = 0; rep < 20; ++rep) {
        const Covector cv{{u(rng), u(rng)}, {std::cos(rep), std::sin(rep)}};
        auto ha = ray_curve_intersections(exact, cv, {-5, 5});
        auto hs = ray_curve_intersections(fine, cv, {-5, 5});
        REQUIRE(ha.size() == hs.size());
        for (std::size_t i = 0; i < ha.size(); ++i) {
            CHECK(std::abs(ha[i].t - hs[i].t) < 5e-4);
            CHECK(std::abs(ha[i].cos_angle - hs[i].cos_angle) < 5e-4);
        }
    }
}

TEST_CASE("self-intersecting sample polylines are rejected") {
    std::vector<CurveSample> fig8;
    const Vec2 pts[] = {{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    double s = 0;
    for (int i = 0; i < 4; ++i) {
        const Vec2 d = (pts[(i + 1) % 4] - pts[i]).unit();
        fig8.push_back({s, pts[i], d});
        s += (pts[(i + 1) % 4] - pts[i]).norm();
    }
    CHECK_THROWS_AS(Curve::sampled(std::move(fig8), true), invalid_input_error);
}

TEST_CASE("classify_covector") {
    const Curve c = unit_circle();

    SECTION("diameter line crosses twice: multiple") {
        const auto cl = classify_covector(c, {{0.5, 0}, {1, 0}});
        CHECK(cl.tag == SigmaTag::multiple);
    }

    SECTION("open upper half arc: single left hit") {
        const Curve arc = sampled_circle(512, /*closed=*/false, M_PI);
        const auto cl = classify_covector(arc, {{0, 0}, {0, 1}});
        CHECK(cl.tag == SigmaTag::SigmaL_plus);
        REQUIRE(cl.hit.has_value());
        CHECK(arc.point(cl.hit->s).y == Approx(1.0).margin(1e-6));
    }

    SECTION("grazing line within tolerance: tangent") {
        const auto cl = classify_covector(c, {{0, 0.999}, {1, 0}});
        CHECK(cl.tag == SigmaTag::tangent);
    }

    SECTION("exterior covector missing the curve: no_hit") {
        const auto cl = classify_covector(c, {{2, 0}, {0, 1}});
        CHECK(cl.tag == SigmaTag::no_hit);
    }

    SECTION("base point on the curve is an error") {
        CHECK_THROWS_AS(classify_covector(c, {{1, 0}, {1, 0}}), on_curve_error);
    }

    SECTION("forward-restricted range turns the interior into SigmaL_plus") {
        ClassifyOptions opt;
        opt.t_range = {1e-9, 10.0};
        const auto cl = classify_covector(c, {{0.5, 0}, {1, 0}}, opt);
        CHECK(cl.tag == SigmaTag::SigmaL_plus);
    }
}

TEST_CASE("mirror") {
    const Curve c = unit_circle();

    SECTION("center covector reflects about the vertical tangent") {
        const Covector m = mirror(c, {{0, 0}, {1, 0}});
        CHECK(m.x.x == Approx(2.0).margin(1e-12));
        CHECK(m.x.y == Approx(0.0).margin(1e-12));
        CHECK(m.xi.x == Approx(-1.0).margin(1e-12));
        CHECK(m.xi.y == Approx(0.0).margin(1e-12));
    }

    SECTION("explicit reflection across the tangent at the hit point") {
        const Covector cv{{0, 0.5}, {1, 0}};
        const auto hits = ray_curve_intersections(c, cv, {0, 10});
        REQUIRE(hits.size() == 1);
        const Vec2 p = c.point(hits[0].s);
        const Vec2 u = c.tangent(hits[0].s);
        const Vec2 expect_x = p + (2.0 * (cv.x - p).dot(u) * u - (cv.x - p));
        const Covector m = mirror(c, cv);
        CHECK(m.x.x == Approx(expect_x.x).margin(1e-12));
        CHECK(m.x.y == Approx(expect_x.y).margin(1e-12));
        // distance preservation
        CHECK(dist(cv.x, p) == Approx(dist(m.x, p)).margin(1e-12));
    }

    SECTION("tangent classification is not mirrorable") {
        CHECK_THROWS_AS(mirror(c, {{0, 0.999}, {1, 0}}), not_mirrorable_error);
    }
}

TEST_CASE("mirror involution and distance preservation properties") {
    const Curve c = unit_circle();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pos(-0.7, 0.7);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    int tested = 0;
    for (int rep = 0; rep < 200 && tested < 50; ++rep) {
        const Covector cv{{pos(rng), pos(rng)},
                          {std::cos(ang(rng)), std::sin(ang(rng))}};
        const auto hits = ray_curve_intersections(c, cv, {1e-9, 10.0});
        if (hits.empty() || std::abs(hits[0].cos_angle) < 0.05) continue;
        ++tested;
        const double s = hits[0].s;
        const Covector m = mirror_about(c, s, cv);
        const Covector back = mirror_about(c, s, m);
        CHECK(dist(back.x, cv.x) < 1e-12);
        CHECK(dist(back.xi, cv.xi) < 1e-12);
        const Vec2 p = c.point(s);
        CHECK(std::abs(dist(cv.x, p) - dist(m.x, p)) < 1e-12);
    }
    REQUIRE(tested >= 40);
}

TEST_CASE("billiard_flow in the unit disc") {
    const Curve c = unit_circle();

    SECTION("free flight before the first reflection") {
        const Covector out = billiard_flow(c, {{0, 0}, {1, 0}}, 0.5);
        CHECK(out.x.x == Approx(0.5).margin(1e-12));
        CHECK(out.xi.x == Approx(1.0).margin(1e-12));
    }

    SECTION("diameter bounce returns through the center reversed") {
        const Covector out = billiard_flow(c, {{0, 0}, {1, 0}}, 2.0);
        CHECK(out.x.x == Approx(0.0).margin(1e-12));
        CHECK(out.x.y == Approx(0.0).margin(1e-12));
        CHECK(out.xi.x == Approx(-1.0).margin(1e-12));
    }

    SECTION("exact reflection time returns the pre-reflection direction") {
        const Covector out = billiard_flow(c, {{0, 0}, {1, 0}}, 1.0);
        CHECK(out.x.x == Approx(1.0).margin(1e-12));
        CHECK(out.xi.x == Approx(1.0).margin(1e-12));  // limit from the left
    }

    SECTION("generic orbit against the marching oracle") {
        const Covector cv{{0.3, 0.1}, {0.8, 0.6}};
        for (double t : {5.0, -5.0, 7.3, -3.7}) {
            const Covector got = billiard_flow(c, cv, t);
            const Covector want = oracle::billiard_marching(c, cv, t, 5e-4);
            CHECK(dist(got.x, want.x) < 5e-3);  // oracle bisection accuracy
            CHECK(dist(got.xi, want.xi) < 5e-3);
        }
    }

    SECTION("outside start is rejected") {
        CHECK_THROWS_AS(billiard_flow(c, {{2, 0}, {1, 0}}, 1.0),
                        invalid_input_error);
    }
}

TEST_CASE("billiard_flow matches the chord-angle closed form over 50 reflections") {
    const Curve c = unit_circle();
    const Covector cv{{0.3, 0.1}, {0.8, 0.6}};
    const auto segs = oracle::chord_unroll_forward(c, cv, 120.0);
    REQUIRE(segs.size() >= 50);
    int checked = 0;
    for (std::size_t k = 0; k < segs.size() && checked < 50; k += 1, ++checked) {
        const auto& seg = segs[k];
        const double t = 0.5 * (seg.segment_start + seg.segment_end);
        const Covector got = billiard_flow(c, cv, t);
        const Vec2 want_pos = seg.position + t * seg.direction;
        CHECK(dist(got.x, want_pos) < 1e-8);
        CHECK(dist(got.xi, seg.direction) < 1e-8);
        CHECK(got.xi.norm() == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("segment constancy of the unrolled flow") {
    const Curve c = unit_circle();
    const Covector cv{{0.2, -0.3}, {0.6, 0.8}};
    // Interior times of the segment after the second reflection.
    const auto segs = oracle::chord_unroll_forward(c, cv, 20.0);
    REQUIRE(segs.size() >= 3);
    const auto& seg = segs[1];
    Vec2 first_x, first_xi;
    for (int i = 0; i < 5; ++i) {
        const double t = seg.segment_start +
                         (i + 1) / 6.0 * (seg.segment_end - seg.segment_start);
        const Covector ft = billiard_flow(c, cv, t);
        const Vec2 d = ft.xi.unit();
        const Vec2 unrolled = ft.x - t * d;
        if (i == 0) {
            first_x = unrolled;
            first_xi = ft.xi;
        } else {
            CHECK(dist(unrolled, first_x) < 1e-10);
            CHECK(dist(ft.xi, first_xi) < 1e-10);
        }
    }
}

TEST_CASE("artifact_set") {
    const Curve c = unit_circle();
    const Covector cv{{0, 0}, {1, 0}};

    SECTION("no reflection before t_max") {
        const auto chain = artifact_set(c, cv, 0.9);
        REQUIRE(chain.records.size() == 1);
        CHECK(chain.records[0].segment_index == 0);
        CHECK(dist(chain.records[0].cv.x, cv.x) < 1e-12);
        CHECK(dist(chain.records[0].cv.xi, cv.xi) < 1e-12);
    }

    SECTION("first forward bounce adds the mirror covector") {
        const auto chain = artifact_set(c, cv, 2.0);
        bool found = false;
        for (const auto& rec : chain.records) {
            if (rec.segment_index != 1) continue;
            found = true;
            CHECK(rec.cv.x.x == Approx(2.0).margin(1e-12));
            CHECK(rec.cv.xi.x == Approx(-1.0).margin(1e-12));
            CHECK(rec.reflection_time == Approx(1.0).margin(1e-12));
        }
        CHECK(found);
    }

    SECTION("second forward bounce unrolls to (-4, 0)") {
        const auto chain = artifact_set(c, cv, 4.0);
        bool found = false;
        for (const auto& rec : chain.records) {
            if (rec.segment_index != 2) continue;
            found = true;
            CHECK(rec.cv.x.x == Approx(-4.0).margin(1e-12));
            CHECK(rec.cv.xi.x == Approx(1.0).margin(1e-12));
            CHECK(rec.reflection_time == Approx(3.0).margin(1e-12));
        }
        CHECK(found);
        // both signs of t are walked
        CHECK(chain.records.front().segment_index == -2);
        CHECK(chain.records.back().segment_index == 2);
    }

    SECTION("segment-1 element equals the tangent-line mirror") {
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> pos(-0.6, 0.6);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
        for (int rep = 0; rep < 20; ++rep) {
            const Covector rc{{pos(rng), pos(rng)},
                              {std::cos(ang(rng)), std::sin(ang(rng))}};
            const auto chain = artifact_set(c, rc, 3.0);
            const Covector m = mirror(c, rc);
            bool found = false;
            for (const auto& rec : chain.records) {
                if (rec.segment_index != 1) continue;
                found = true;
                CHECK(dist(rec.cv.x, m.x) < 1e-10);
                CHECK(dist(rec.cv.xi, m.xi) < 1e-10);
            }
            CHECK(found);
        }
    }
}
