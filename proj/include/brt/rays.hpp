#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "brt/geometry.hpp"

namespace brt {

/// Transmitter k sits at angle 2*pi*k/n_tx from the +x axis; receivers likewise.
struct StationLayout {
    CircleBoundary boundary;
    std::vector<Vec2> transmitters;
    std::vector<Vec2> receivers;

    int n_tx() const { return static_cast<int>(transmitters.size()); }
    int n_rx() const { return static_cast<int>(receivers.size()); }
};

StationLayout place_stations(const CircleBoundary& boundary, int n_tx, int n_rx);

enum class RayKind { Unbroken, Broken };

struct Segment {
    Vec2 a;
    Vec2 b;
};

/// One chord (Unbroken) or two legs meeting at a reflection point (Broken).
struct RayPath {
    RayKind kind = RayKind::Unbroken;
    Vec2 tx;
    std::optional<Vec2> reflection;
    Vec2 rx;

    std::vector<Segment> legs() const;
    double length() const;
    friend bool operator==(const RayPath&, const RayPath&) = default;
};

struct RaySet {
    std::vector<RayPath> rays;
    std::uint64_t seed = 0;
    double fraction_unbroken = 1.0;

    std::size_t size() const { return rays.size(); }
    std::size_t count(RayKind kind) const;
};

/// How transmitter/receiver pairs map to unbroken rays.
///   Ordered:   every (transmitter, receiver) pair is its own ray, as long as the
///              two stations are at distinct positions.
///   Unordered: transmitters and receivers are merged into one station set
///              (coincident positions collapse) and a ray is an unordered pair.
enum class PairConvention { Ordered, Unordered };

/// Where a reflected ray is received.
///   Continuous: exact exit point on the circle (reflection law holds exactly).
///   SnapToStation: nearest receiver station by angle.
enum class ReceiverModel { Continuous, SnapToStation };

struct RayRules {
    PairConvention pairing = PairConvention::Ordered;
    /// Chords shorter than this are not generated (0 keeps every chord).
    double min_chord_length = 0.0;
    ReceiverModel receiver = ReceiverModel::Continuous;
    /// Rejection budget per requested broken ray.
    std::size_t attempts_per_ray = 200;
};

RayPath make_unbroken_ray(Vec2 tx, Vec2 rx, const Obstacle& obstacle, double eps_on = kOnBoundaryEpsilon);
RayPath make_unbroken_ray(const Scene& scene, Vec2 tx, Vec2 rx);

/// Reflects the ray tx->q specularly at q and returns the path to the circle
/// exit. Throws NotVisible, CornerPoint, GrazingIncidence or BackFacing.
RayPath make_broken_ray(Vec2 tx, Vec2 q, const Obstacle& obstacle, const CircleBoundary& boundary,
                        double eps_on = kOnBoundaryEpsilon);
RayPath make_broken_ray(const Scene& scene, Vec2 tx, Vec2 q);

/// Non-throwing variant used by the samplers; sets `why` on rejection.
std::optional<RayPath> try_broken_ray(const Scene& scene, Vec2 tx, Vec2 q, Errc& why);

/// Every admissible unbroken ray in deterministic (tx-major) order.
RaySet enumerate_unbroken(const StationLayout& layout, const Obstacle* obstacle, const RayRules& rules = {},
                          double eps_on = kOnBoundaryEpsilon);
RaySet enumerate_unbroken(const Scene& scene, const StationLayout& layout, const RayRules& rules = {});

/// n_total rays, round(n_total*fraction_unbroken) of them unbroken. Unbroken
/// rays are drawn uniformly without replacement from the admissible pairs;
/// broken rays pair a uniform transmitter with a uniform arc-length point on
/// the obstacle, rejecting invalid or duplicate draws. The kinds are
/// interleaved by a seeded shuffle, which fixes the row order.
RaySet sample_ray_set(const Scene& scene, const StationLayout& layout, std::size_t n_total,
                      double fraction_unbroken, std::uint64_t seed, const RayRules& rules = {});

/// Sorted Region cells crossed with positive length.
std::vector<std::int32_t> discrete_signature(const Scene& scene, const RayPath& ray);

std::int64_t class_count_bound(std::int64_t v1, std::int64_t v2);

struct BoundaryCellCounts {
    std::int64_t circle = 0;    // Region cells whose square meets the observation circle
    std::int64_t obstacle = 0;  // Region cells 8-adjacent to an Obstacle cell
};

BoundaryCellCounts boundary_cell_counts(const Scene& scene);

/// `U txx txy rxx rxy` or `B txx txy qx qy rxx rxy`, one ray per line, 17
/// significant digits.
void write_rays(std::ostream& out, const RaySet& rays);
std::vector<RayPath> read_rays(std::istream& in);

}  // namespace brt
