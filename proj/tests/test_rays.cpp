#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "brt/projection.hpp"
#include "brt/rays.hpp"
#include "oracles.hpp"

using namespace brt;

namespace {

Scene reference_scene() { return make_scene(64, 13.0, 350.0, Obstacle::square({0.0, 0.0}, 30 * 13.0)); }

RayRules reference_rules() {
    RayRules r;
    r.min_chord_length = 13.0;
    return r;
}

void check_ray_invariants(const Scene& s, const RayPath& r) {
    CHECK(std::abs(distance(r.tx, s.boundary.center) - s.boundary.radius) <= 1e-9 * s.boundary.radius);
    CHECK(std::abs(distance(r.rx, s.boundary.center) - s.boundary.radius) <= 1e-9 * s.boundary.radius);
    for (const Segment& leg : r.legs()) CHECK_FALSE(segment_blocked(leg.a, leg.b, *s.obstacle, s.eps_on()));
    if (r.kind == RayKind::Broken) {
        const Vec2 n = outward_normal(*s.obstacle, *r.reflection, s.eps_on());
        const double incidence = oracle::angle_between(r.tx - *r.reflection, n);
        const double reflection = oracle::angle_between(r.rx - *r.reflection, n);
        CHECK(std::abs(incidence - reflection) < 1e-10);
    }
}

}  // namespace

TEST_CASE("place_stations") {
    const CircleBoundary c{{0, 0}, 350.0};
    const StationLayout four = place_stations(c, 4, 4);
    const Vec2 expect[4] = {{350, 0}, {0, 350}, {-350, 0}, {0, -350}};
    for (int k = 0; k < 4; ++k) CHECK(distance(four.transmitters[k], expect[k]) < 1e-12);

    const StationLayout big = place_stations(c, 512, 512);
    REQUIRE(big.n_tx() == 512);
    REQUIRE(big.n_rx() == 512);
    for (int k = 0; k < 512; ++k) {
        CHECK(std::abs(norm(big.transmitters[k]) - 350.0) <= 1e-12 * 350.0);
        const Vec2 a = big.transmitters[k];
        const Vec2 b = big.transmitters[(k + 1) % 512];
        CHECK(oracle::angle_between(a, b) == doctest::Approx(2.0 * std::numbers::pi / 512).epsilon(1e-9));
    }
    CHECK_THROWS_AS(place_stations(c, 1, 4), Error);
}

TEST_CASE("make_unbroken_ray") {
    const Obstacle small = Obstacle::square({0, 0}, 50.0);
    const RayPath r = make_unbroken_ray({0, 350}, {350, 0}, small);
    CHECK(r.kind == RayKind::Unbroken);
    CHECK_FALSE(r.reflection.has_value());
    CHECK_THROWS_WITH_AS(make_unbroken_ray({-350, 0}, {350, 0}, small), doctest::Contains("Blocked"), Error);
    CHECK_THROWS_WITH_AS(make_unbroken_ray({0, 350}, {0, 350}, small), doctest::Contains("DegenerateRay"), Error);
}

TEST_CASE("make_broken_ray") {
    const Scene s = reference_scene();
    const double half = 195.0;
    SUBCASE("symmetric reflection off the right face mirrors the transmitter") {
        const double theta = 0.1;
        const Vec2 tx{350.0 * std::cos(theta), 350.0 * std::sin(theta)};
        const RayPath r = make_broken_ray(s, tx, {half, 0.0});
        CHECK(r.kind == RayKind::Broken);
        CHECK(r.rx.x == doctest::Approx(tx.x).epsilon(1e-12));
        CHECK(r.rx.y == doctest::Approx(-tx.y).epsilon(1e-12));
    }
    SUBCASE("normal incidence retro-reflects") {
        const RayPath r = make_broken_ray(s, {350, 0}, {half, 0.0});
        CHECK(distance(r.rx, {350, 0}) < 1e-9);
    }
    SUBCASE("error paths") {
        CHECK_THROWS_WITH_AS(make_broken_ray(s, {-350, 0}, {half, 0}), doctest::Contains("BackFacing"), Error);
        CHECK_THROWS_WITH_AS(make_broken_ray(s, {350, 0}, {half, half}), doctest::Contains("CornerPoint"), Error);
        CHECK_THROWS_WITH_AS(make_broken_ray(s, {0, 350}, {half, 0}), doctest::Contains("BackFacing"), Error);
        CHECK_THROWS_WITH_AS(make_broken_ray(s, {half, -350 + 1e-12}, {half, 0}),
                             doctest::Contains("GrazingIncidence"), Error);
        CHECK_THROWS_WITH_AS(make_broken_ray(s, {350, 0}, {100, 0}), doctest::Contains("NotOnBoundary"), Error);
    }
    SUBCASE("random valid rays obey the reflection law") {
        const StationLayout layout = place_stations(s.boundary, 512, 512);
        std::mt19937_64 gen(17);
        std::uniform_int_distribution<int> t(0, 511);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int accepted = 0;
        for (int k = 0; k < 4000; ++k) {
            const Vec2 tx = layout.transmitters[t(gen)];
            const Vec2 q = s.obstacle->point_at(u(gen) * s.obstacle->perimeter());
            Errc why{};
            auto r = try_broken_ray(s, tx, q, why);
            if (!r) continue;
            ++accepted;
            check_ray_invariants(s, *r);
        }
        CHECK(accepted > 500);
    }
}

TEST_CASE("enumerate_unbroken") {
    SUBCASE("reference layout counts") {
        const Scene s = reference_scene();
        const StationLayout layout = place_stations(s.boundary, 512, 512);
        // Frozen from an independent Liang-Barsky enumeration of all 512x512 pairs.
        RayRules ordered;
        CHECK(enumerate_unbroken(s, layout, ordered).size() == 129272);
        RayRules unordered;
        unordered.pairing = PairConvention::Unordered;
        CHECK(enumerate_unbroken(s, layout, unordered).size() == 64636);
        const std::size_t n = enumerate_unbroken(s, layout, reference_rules()).size();
        CHECK(n == 126200);
        CHECK(std::abs(static_cast<double>(n) - 126050.0) <= 0.02 * 126050.0);
    }
    SUBCASE("four stations without an obstacle") {
        const Scene s = make_scene(64, 13.0, 350.0, std::nullopt);
        const StationLayout layout = place_stations(s.boundary, 4, 4);
        RayRules unordered;
        unordered.pairing = PairConvention::Unordered;
        CHECK(enumerate_unbroken(s, layout, unordered).size() == 6);
        CHECK(enumerate_unbroken(s, layout).size() == 12);
    }
    SUBCASE("tiny obstacle blocking both diagonals") {
        const Obstacle tiny = Obstacle::square({0, 0}, 1.0);
        const Scene s = make_scene(64, 13.0, 350.0, tiny);
        const StationLayout layout = place_stations(s.boundary, 4, 4);
        std::size_t oracle_count = 0;
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                oracle_count += !oracle::blocked_by_sampling(layout.transmitters[i], layout.transmitters[j],
                                                             tiny.vertices(), 100001, 1e-9);
            }
        }
        REQUIRE(oracle_count == 4);
        RayRules unordered;
        unordered.pairing = PairConvention::Unordered;
        CHECK(enumerate_unbroken(s, layout, unordered).size() == oracle_count);
    }
}

TEST_CASE("sample_ray_set") {
    const Scene s = reference_scene();
    const StationLayout layout = place_stations(s.boundary, 512, 512);
    SUBCASE("reference 1:1 sample") {
        const RaySet set = sample_ray_set(s, layout, 126050, 0.5, 42, reference_rules());
        CHECK(set.size() == 126050);
        CHECK(set.count(RayKind::Broken) == 63025);
        CHECK(set.count(RayKind::Unbroken) == 63025);
        for (std::size_t k = 0; k < set.size(); k += 97) check_ray_invariants(s, set.rays[k]);
        std::set<std::tuple<double, double, double, double, double, double>> seen;
        for (const RayPath& r : set.rays) {
            const Vec2 q = r.reflection.value_or(Vec2{NAN, NAN});
            seen.insert({r.tx.x, r.tx.y, std::isnan(q.x) ? 1e300 : q.x, std::isnan(q.y) ? 1e300 : q.y, r.rx.x, r.rx.y});
        }
        CHECK(seen.size() == set.size());
    }
    SUBCASE("pure chord configuration") {
        const RaySet set = sample_ray_set(s, layout, 5000, 1.0, 1, reference_rules());
        CHECK(set.count(RayKind::Unbroken) == 5000);
    }
    SUBCASE("seeded reproducibility") {
        const RaySet a = sample_ray_set(s, layout, 3000, 0.5, 9, reference_rules());
        const RaySet b = sample_ray_set(s, layout, 3000, 0.5, 9, reference_rules());
        const RaySet c = sample_ray_set(s, layout, 3000, 0.5, 10, reference_rules());
        CHECK(a.rays == b.rays);
        CHECK(a.rays != c.rays);
        std::size_t shared = 0;
        for (std::size_t k = 0; k < a.size(); ++k) {
            if (a.rays[k].kind == RayKind::Broken && a.rays[k] == c.rays[k]) ++shared;
        }
        CHECK(shared == 0);
    }
    SUBCASE("kinds are interleaved") {
        const RaySet set = sample_ray_set(s, layout, 1000, 0.5, 3, reference_rules());
        std::size_t first_half_broken = 0;
        for (std::size_t k = 0; k < 500; ++k) first_half_broken += set.rays[k].kind == RayKind::Broken;
        CHECK(first_half_broken > 200);
        CHECK(first_half_broken < 300);
    }
    SUBCASE("snapped receivers are stations") {
        RayRules snap = reference_rules();
        snap.receiver = ReceiverModel::SnapToStation;
        const RaySet set = sample_ray_set(s, layout, 400, 0.0, 4, snap);
        for (const RayPath& r : set.rays) {
            const bool on_station = std::any_of(layout.receivers.begin(), layout.receivers.end(),
                                                [&](Vec2 p) { return p == r.rx; });
            CHECK(on_station);
        }
    }
    SUBCASE("over-constrained requests") {
        const StationLayout few = place_stations(s.boundary, 8, 8);
        CHECK_THROWS_WITH_AS(sample_ray_set(s, few, 100, 1.0, 1), doctest::Contains("ExhaustedCandidates"), Error);
        CHECK_THROWS_AS(sample_ray_set(s, layout, 0, 0.5, 1), Error);
        CHECK_THROWS_AS(sample_ray_set(s, layout, 10, 1.5, 1), Error);
        const Scene open = make_scene(64, 13.0, 350.0, std::nullopt);
        CHECK_THROWS_AS(sample_ray_set(open, layout, 10, 0.5, 1), Error);
    }
}

TEST_CASE("discrete_signature") {
    const Scene s = reference_scene();
    SUBCASE("parallel rays in one cell row share a signature") {
        const double y = s.grid.origin.y + 50 * 13.0 + 5.0;  // cell row 50 lies above the obstacle
        const double x = std::sqrt(350.0 * 350.0 - y * y);
        const double y2 = y + 1.3;
        const double x2 = std::sqrt(350.0 * 350.0 - y2 * y2);
        const RayPath a{RayKind::Unbroken, {-x, y}, std::nullopt, {x, y}};
        const RayPath b{RayKind::Unbroken, {-x2, y2}, std::nullopt, {x2, y2}};
        const auto sa = discrete_signature(s, a);
        CHECK_FALSE(sa.empty());
        CHECK(sa == discrete_signature(s, b));
    }
    SUBCASE("reversal and random rays match sampled rasterization") {
        const StationLayout layout = place_stations(s.boundary, 512, 512);
        const RaySet set = sample_ray_set(s, layout, 300, 0.5, 5, reference_rules());
        const double step = 13.0 / 2000.0;
        for (const RayPath& r : set.rays) {
            RayPath rev = r;
            std::swap(rev.tx, rev.rx);
            const auto sig = discrete_signature(s, r);
            CHECK(sig == discrete_signature(s, rev));
            std::set<std::int32_t> sampled;
            for (const Segment& leg : r.legs()) {
                for (std::int32_t c : oracle::sampled_cells(s.grid, leg.a, leg.b, step)) {
                    if (s.is_region(c)) sampled.insert(c);
                }
            }
            // every sampled cell is in the signature; signature cells crossed
            // by more than two sample spacings are sampled
            for (std::int32_t c : sampled) CHECK(std::binary_search(sig.begin(), sig.end(), c));
            const SparseRow row = ray_row(s, r);
            for (std::size_t k = 0; k < row.size(); ++k) {
                if (row.weights[k] > 2.0 * step) CHECK(sampled.count(row.cells[k]) == 1);
            }
        }
    }
}

TEST_CASE("class_count_bound") {
    CHECK(class_count_bound(0, 5) == 0);
    CHECK(class_count_bound(10, 5) == 150);
    CHECK(class_count_bound(37, 0) == 37 * 37);

    const Scene s = reference_scene();
    const BoundaryCellCounts counts = boundary_cell_counts(s);
    CHECK(counts.circle > 0);
    CHECK(counts.obstacle == 4 * 30 + 4);  // ring around a 30x30 block
    const StationLayout layout = place_stations(s.boundary, 128, 128);
    const RaySet chords = enumerate_unbroken(s, layout, reference_rules());
    std::set<std::vector<std::int32_t>> classes;
    for (const RayPath& r : chords.rays) classes.insert(discrete_signature(s, r));
    CHECK(static_cast<std::int64_t>(classes.size()) <= class_count_bound(counts.circle, counts.obstacle));
}

TEST_CASE("ray text format") {
    const Scene s = reference_scene();
    const StationLayout layout = place_stations(s.boundary, 64, 64);
    const RaySet set = sample_ray_set(s, layout, 200, 0.5, 8, reference_rules());
    std::stringstream io;
    write_rays(io, set);
    const std::string text = io.str();
    CHECK(text.rfind(set.rays[0].kind == RayKind::Broken ? "B " : "U ", 0) == 0);
    CHECK(read_rays(io) == set.rays);

    std::istringstream bad("X 1 2 3 4\n");
    CHECK_THROWS_AS(read_rays(bad), Error);
    std::istringstream short_line("B 1 2 3 4\n");
    CHECK_THROWS_AS(read_rays(short_line), Error);
}
