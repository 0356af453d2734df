#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "brt/geometry.hpp"
#include "brt/rays.hpp"
#include "oracles.hpp"

using namespace brt;

namespace {

Scene reference_scene() { return make_scene(64, 13.0, 350.0, Obstacle::square({0.0, 0.0}, 30 * 13.0)); }

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

TEST_CASE("obstacle construction") {
    SUBCASE("clockwise input is stored counter-clockwise") {
        Obstacle o({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
        CHECK(o.area() == doctest::Approx(1.0));
        const auto v = o.vertices();
        double twice_area = 0.0;
        for (std::size_t k = 0; k < v.size(); ++k) twice_area += cross(v[k], v[(k + 1) % v.size()]);
        CHECK(twice_area > 0.0);
        for (std::size_t k = 0; k < v.size(); ++k) {
            const Vec2 mid = 0.5 * (o.edge_start(k) + o.edge_end(k));
            CHECK(dot(o.edge_normal(k), mid - o.centroid()) > 0.0);
        }
    }
    SUBCASE("degenerate and non-convex polygons are rejected") {
        CHECK_THROWS_AS(Obstacle({{0, 0}, {1, 0}}), Error);
        CHECK_THROWS_AS(Obstacle({{0, 0}, {1, 0}, {2, 0}}), Error);
        CHECK_THROWS_AS(Obstacle({{0, 0}, {2, 0}, {1, 0.2}, {2, 2}, {0, 2}}), Error);
        CHECK_THROWS_AS(Obstacle({{0, 0}, {1, 0}, {2, 0}, {1, 1}}), Error);
    }
    SUBCASE("arc-length parametrization walks the edges") {
        const Obstacle sq = Obstacle::square({0, 0}, 2.0);
        CHECK(sq.perimeter() == doctest::Approx(8.0));
        CHECK(sq.point_at(0.0) == Vec2{-1, -1});
        CHECK(sq.point_at(1.0).x == doctest::Approx(0.0));
        CHECK(sq.point_at(3.0).x == doctest::Approx(1.0));
        CHECK(sq.point_at(3.0).y == doctest::Approx(0.0));
        CHECK(sq.point_at(9.0).x == doctest::Approx(0.0));
        CHECK(sq.centroid().x == doctest::Approx(0.0));
    }
}

TEST_CASE("classify_cells") {
    SUBCASE("cell at the circle center with the obstacle elsewhere is Region") {
        const Grid g{{-50, -50}, 10, 10.0};
        const CircleBoundary c{{0, 0}, 45.0};
        const Obstacle far({{20, 20}, {30, 20}, {30, 30}, {20, 30}});
        const CellMask m = classify_cells(g, c, far);
        CHECK(m[g.index(5, 5)] == CellClass::Region);
        CHECK(m[g.index(7, 7)] == CellClass::Obstacle);
        CHECK(m[g.index(0, 0)] == CellClass::Exterior);
    }
    SUBCASE("cell at the obstacle centroid is Obstacle") {
        const Scene s = reference_scene();
        const std::int32_t i = static_cast<std::int32_t>((s.obstacle->centroid().x - s.grid.origin.x) / 13.0);
        CHECK(s.mask[s.grid.index(i, i)] == CellClass::Obstacle);
    }
    SUBCASE("reference grid agrees with a brute-force classification") {
        const Scene s = reference_scene();
        const auto poly = s.obstacle->vertices();
        std::int64_t region = 0, obstacle = 0, exterior = 0, oracle_region = 0;
        for (std::int32_t c = 0; c < s.grid.cell_count(); ++c) {
            const Vec2 p{s.grid.origin.x + (s.grid.column(c) + 0.5) * 13.0,
                         s.grid.origin.y + (s.grid.row(c) + 0.5) * 13.0};
            const bool in_circle = p.x * p.x + p.y * p.y < 350.0 * 350.0;
            const bool expect_region = in_circle && !oracle::inside_polygon(poly, p);
            oracle_region += expect_region;
            CHECK((s.mask[c] == CellClass::Region) == expect_region);
            region += s.mask[c] == CellClass::Region;
            obstacle += s.mask[c] == CellClass::Obstacle;
            exterior += s.mask[c] == CellClass::Exterior;
        }
        CHECK(region == oracle_region);
        CHECK(obstacle == 900);
        CHECK(region + obstacle + exterior == 4096);
        CHECK(region == s.region_count());
    }
}

TEST_CASE("reflect") {
    auto check = [](Vec2 d, Vec2 n, Vec2 expect) {
        const Vec2 r = reflect(d, n);
        CHECK(r.x == doctest::Approx(expect.x).epsilon(1e-14));
        CHECK(r.y == doctest::Approx(expect.y).epsilon(1e-14));
    };
    const double h = std::sqrt(2.0) / 2.0;
    check({-1, 0}, {1, 0}, {1, 0});
    check({h, -h}, {0, 1}, {h, h});
    check({0.6, 0.8}, {0, -1}, {0.6, -0.8});
    CHECK_THROWS_WITH_AS(reflect({1, 0}, {0, 1}), doctest::Contains("GrazingIncidence"), Error);

    SUBCASE("involution and unit length") {
        std::mt19937_64 gen(7);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
        int tested = 0;
        while (tested < 2000) {
            const Vec2 n = unit(ang(gen));
            const Vec2 d = unit(ang(gen));
            if (dot(d, n) > -1e-6) continue;
            ++tested;
            const Vec2 r = reflect(d, n);
            CHECK(std::abs(norm(r) - 1.0) < 1e-12);
            const Vec2 back = -reflect(-r, n);
            CHECK(distance(back, d) < 1e-12);
            CHECK(std::abs(oracle::angle_between(r, n) - oracle::angle_between(-d, n)) < 1e-7);
        }
    }
}

TEST_CASE("outward_normal") {
    const Obstacle sq = Obstacle::square({0, 0}, 2.0);
    CHECK(outward_normal(sq, {1, 0}) == Vec2{1, 0});
    CHECK(outward_normal(sq, {0.3, 1}) == Vec2{0, 1});
    CHECK(outward_normal(sq, {-1, 0.5}) == Vec2{-1, 0});
    CHECK_THROWS_WITH_AS(outward_normal(sq, {1, 1}), doctest::Contains("CornerPoint"), Error);
    CHECK_THROWS_WITH_AS(outward_normal(sq, {0.5, 0.5}), doctest::Contains("NotOnBoundary"), Error);
}

TEST_CASE("segment_blocked") {
    const Scene s = reference_scene();
    const Obstacle& ob = *s.obstacle;
    CHECK(segment_blocked({-350, 0}, {350, 0}, ob));
    CHECK_FALSE(segment_blocked({-350, 300}, {350, 300}, ob));
    SUBCASE("boundary contact is not blocking") {
        CHECK_FALSE(segment_blocked({-350, 195}, {350, 195}, ob));  // along the top edge
        CHECK_FALSE(segment_blocked({195, 0}, {350, 0}, ob));       // starts on the right face
        CHECK_FALSE(segment_blocked({0, 390}, {390, 0}, ob));       // touches the corner (195, 195)
        CHECK(segment_blocked({194, 0}, {350, 0}, ob));
    }
    SUBCASE("random station pairs agree with dense sampling") {
        const StationLayout layout = place_stations(s.boundary, 512, 512);
        std::mt19937_64 gen(11);
        std::uniform_int_distribution<int> pick(0, 511);
        int disagreements = 0;
        for (int k = 0; k < 1000; ++k) {
            const Vec2 a = layout.transmitters[pick(gen)];
            const Vec2 b = layout.receivers[pick(gen)];
            if (a == b) continue;
            const bool got = segment_blocked(a, b, ob, s.eps_on());
            const bool expect = oracle::blocked_by_sampling(a, b, ob.vertices(), 20000, 1e-6);
            if (got != expect) {
                // Only near-tangent chords may disagree: the coarse sampling
                // misses slivers thinner than one sample spacing.
                ++disagreements;
                CHECK_FALSE(oracle::blocked_by_sampling(a, b, ob.vertices(), 20000, 0.05 * 13.0));
            }
        }
        CHECK(disagreements <= 2);
    }
    SUBCASE("reflected rays of a convex obstacle never re-enter it") {
        std::mt19937_64 gen(3);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int tested = 0;
        while (tested < 2000) {
            const Vec2 q = ob.point_at(u(gen) * ob.perimeter());
            Vec2 normal;
            try {
                normal = outward_normal(ob, q, s.eps_on());
            } catch (const Error&) {
                continue;
            }
            const Vec2 dir = unit(2.0 * std::numbers::pi * u(gen));
            if (dot(dir, normal) <= 1e-6) continue;
            ++tested;
            const Vec2 exit = circle_exit(q, dir, s.boundary);
            CHECK_FALSE(segment_blocked(q + s.eps_on() * dir, exit, ob, s.eps_on()));
        }
    }
}

TEST_CASE("circle_exit") {
    const CircleBoundary c{{0, 0}, 350.0};
    CHECK(circle_exit({0, 0}, {1, 0}, c).x == doctest::Approx(350.0));
    const Vec2 p = circle_exit({349, 0}, {1, 0}, c);
    CHECK(p.x == doctest::Approx(350.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK_THROWS_AS(circle_exit({351, 0}, {1, 0}, c), Error);

    SUBCASE("random interior origins land on the circle ahead of the origin") {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
        for (int k = 0; k < 5000; ++k) {
            const Vec2 o{349.0 * u(gen), 349.0 * u(gen)};
            if (norm(o) >= 349.9) continue;
            const Vec2 d = unit(ang(gen));
            const Vec2 e = circle_exit(o, d, c);
            // quadratic-formula oracle: t = -b + sqrt(b^2 - (|o|^2 - R^2))
            const double b = dot(o, d);
            const double t = -b + std::sqrt(b * b - (dot(o, o) - 350.0 * 350.0));
            CHECK(std::abs(norm(e) - 350.0) <= 1e-9 * 350.0);
            CHECK(distance(e, o + t * d) < 1e-7);
            CHECK(dot(e - o, d) > 0.0);
        }
    }
}

TEST_CASE("make_scene validation") {
    CHECK_THROWS_AS(make_scene(64, 13.0, 420.0, std::nullopt), Error);
    CHECK_THROWS_AS(make_scene(64, 13.0, 350.0, Obstacle::square({0, 0}, 500.0)), Error);
    CHECK_THROWS_AS(make_scene(0, 13.0, 350.0, std::nullopt), Error);
    const Scene s = make_scene(64, 13.0, 350.0, std::nullopt);
    CHECK(s.grid.origin == Vec2{-416.0, -416.0});
    CHECK(s.grid.cell_center(s.grid.index(32, 32)) == Vec2{6.5, 6.5});
}
