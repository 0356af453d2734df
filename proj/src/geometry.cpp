#include "brt/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace brt {

namespace {

double signed_area(std::span<const Vec2> v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        a += cross(v[i], v[(i + 1) % v.size()]);
    }
    return 0.5 * a;
}

}  // namespace

Obstacle::Obstacle(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) {
        throw Error(Errc::InvalidGeometry, "obstacle needs at least 3 vertices");
    }
    if (signed_area(vertices_) < 0.0) {
        std::reverse(vertices_.begin(), vertices_.end());
    }
    const double area = signed_area(vertices_);
    if (!(area > 0.0) || !std::isfinite(area)) {
        throw Error(Errc::InvalidGeometry, "obstacle has zero area");
    }
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e0 = vertices_[(i + 1) % n] - vertices_[i];
        const Vec2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
        if (!(cross(e0, e1) > 0.0)) {
            throw Error(Errc::InvalidGeometry, "obstacle is not strictly convex at vertex " +
                                                   std::to_string((i + 1) % n));
        }
    }
    normals_.reserve(n);
    cumulative_.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = edge_end(i) - edge_start(i);
        const double len = norm(e);
        // CCW polygon: the outward normal is the edge direction turned clockwise.
        normals_.push_back(Vec2{e.y, -e.x} / len);
        cumulative_.push_back(perimeter_);
        perimeter_ += len;
    }
}

Obstacle Obstacle::square(Vec2 center, double side) {
    const double h = 0.5 * side;
    return Obstacle({center + Vec2{-h, -h}, center + Vec2{h, -h}, center + Vec2{h, h}, center + Vec2{-h, h}});
}

Obstacle Obstacle::regular_polygon(Vec2 center, double circumradius, int sides) {
    if (sides < 3) {
        throw Error(Errc::InvalidGeometry, "regular polygon needs at least 3 sides");
    }
    std::vector<Vec2> v;
    v.reserve(sides);
    for (int k = 0; k < sides; ++k) {
        const double a = 2.0 * std::numbers::pi * k / sides;
        v.push_back(center + circumradius * Vec2{std::cos(a), std::sin(a)});
    }
    return Obstacle(std::move(v));
}

double Obstacle::area() const { return signed_area(vertices_); }

Vec2 Obstacle::centroid() const {
    Vec2 c;
    double a6 = 0.0;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Vec2 p = edge_start(i);
        const Vec2 q = edge_end(i);
        const double w = cross(p, q);
        c += w * (p + q);
        a6 += 3.0 * w;
    }
    return c / a6;
}

bool Obstacle::contains_closed(Vec2 p) const {
    for (std::size_t e = 0; e < vertices_.size(); ++e) {
        if (edge_offset(e, p) > 0.0) return false;
    }
    return true;
}

bool Obstacle::contains_strict(Vec2 p) const {
    for (std::size_t e = 0; e < vertices_.size(); ++e) {
        if (edge_offset(e, p) >= 0.0) return false;
    }
    return true;
}

std::size_t Obstacle::edge_at(double s) const {
    s = std::fmod(s, perimeter_);
    if (s < 0.0) s += perimeter_;
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    return static_cast<std::size_t>(std::distance(cumulative_.begin(), it)) - 1;
}

Vec2 Obstacle::point_at(double s) const {
    s = std::fmod(s, perimeter_);
    if (s < 0.0) s += perimeter_;
    const std::size_t e = edge_at(s);
    const Vec2 a = edge_start(e);
    const Vec2 b = edge_end(e);
    const double len = (e + 1 < cumulative_.size() ? cumulative_[e + 1] : perimeter_) - cumulative_[e];
    return a + ((s - cumulative_[e]) / len) * (b - a);
}

double Obstacle::max_distance_from(Vec2 c) const {
    double r = 0.0;
    for (Vec2 v : vertices_) r = std::max(r, distance(v, c));
    return r;
}

bool same_polygon(const Obstacle& a, const Obstacle& b, double tol) {
    if (a.edge_count() != b.edge_count()) return false;
    for (std::size_t i = 0; i < a.edge_count(); ++i) {
        const Vec2 d = a.vertices()[i] - b.vertices()[i];
        if (std::abs(d.x) > tol || std::abs(d.y) > tol) return false;
    }
    return true;
}

CellMask classify_cells(const Grid& grid, const CircleBoundary& boundary, const Obstacle* obstacle) {
    CellMask mask(static_cast<std::size_t>(grid.cell_count()));
    for (std::int32_t c = 0; c < grid.cell_count(); ++c) {
        const Vec2 p = grid.cell_center(c);
        if (obstacle != nullptr && obstacle->contains_closed(p)) {
            mask[c] = CellClass::Obstacle;
        } else if (boundary.strictly_contains(p)) {
            mask[c] = CellClass::Region;
        } else {
            mask[c] = CellClass::Exterior;
        }
    }
    return mask;
}

Vec2 reflect(Vec2 dir, Vec2 normal) {
    const double dn = dot(dir, normal);
    if (std::abs(dn) < kGrazeEpsilon) {
        throw Error(Errc::GrazingIncidence, "ray is tangent to the reflecting surface");
    }
    return normalized(dir - 2.0 * dn * normal);
}

Vec2 outward_normal(const Obstacle& obstacle, Vec2 p, double eps_on) {
    const double eps_corner = 1e-9 * obstacle.perimeter();
    for (Vec2 v : obstacle.vertices()) {
        if (distance(p, v) < eps_corner) {
            throw Error(Errc::CornerPoint, "normal is undefined at a polygon vertex");
        }
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_edge = 0;
    for (std::size_t e = 0; e < obstacle.edge_count(); ++e) {
        const Vec2 a = obstacle.edge_start(e);
        const Vec2 ab = obstacle.edge_end(e) - a;
        const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
        const double dist = distance(p, a + t * ab);
        if (dist < best) {
            best = dist;
            best_edge = e;
        }
    }
    if (best > eps_on) {
        throw Error(Errc::NotOnBoundary, "point is not on the obstacle boundary");
    }
    return obstacle.edge_normal(best_edge);
}

bool segment_blocked(Vec2 a, Vec2 b, const Obstacle& obstacle, double eps_on) {
    // Cyrus-Beck clip against the polygon inset by eps_on; blocked iff the
    // surviving parameter interval inside (0, 1) is non-empty.
    const Vec2 ab = b - a;
    double lo = 0.0;
    double hi = 1.0;
    for (std::size_t e = 0; e < obstacle.edge_count(); ++e) {
        const double s0 = obstacle.edge_offset(e, a) + eps_on;
        const double ds = dot(obstacle.edge_normal(e), ab);
        if (ds == 0.0) {
            if (s0 >= 0.0) return false;
            continue;
        }
        const double t = -s0 / ds;
        if (ds > 0.0) {
            hi = std::min(hi, t);
        } else {
            lo = std::max(lo, t);
        }
        if (!(lo < hi)) return false;
    }
    return lo < hi;
}

Vec2 circle_exit(Vec2 origin, Vec2 dir, const CircleBoundary& boundary) {
    const Vec2 m = origin - boundary.center;
    const double c = dot(m, m) - boundary.radius * boundary.radius;
    if (!(c < 0.0)) {
        throw Error(Errc::InvalidArgument, "circle_exit origin is not strictly inside the circle");
    }
    const double b = dot(m, dir);
    const double root = std::sqrt(b * b - c);
    // Positive root of t^2 + 2bt + c = 0, in the cancellation-free form.
    const double t = b > 0.0 ? -c / (b + root) : root - b;
    return origin + t * dir;
}

std::int32_t Scene::region_count() const {
    return static_cast<std::int32_t>(std::count(mask.begin(), mask.end(), CellClass::Region));
}

Scene make_scene(int cells_per_row, double cell_size, double radius, std::optional<Obstacle> obstacle) {
    if (cells_per_row <= 0) throw Error(Errc::InvalidGeometry, "cells_per_row must be positive");
    if (!(cell_size > 0.0)) throw Error(Errc::InvalidGeometry, "cell_size must be positive");
    if (!(radius > 0.0)) throw Error(Errc::InvalidGeometry, "radius must be positive");
    const double half = 0.5 * cells_per_row * cell_size;
    if (radius > half) {
        throw Error(Errc::InvalidGeometry, "observation circle does not fit inside the grid");
    }
    const CircleBoundary circle{{0.0, 0.0}, radius};
    if (obstacle && !(obstacle->max_distance_from(circle.center) < radius)) {
        throw Error(Errc::InvalidGeometry, "obstacle is not strictly inside the observation circle");
    }
    Scene scene{Grid{{-half, -half}, cells_per_row, cell_size}, circle, std::move(obstacle), {}};
    scene.mask = classify_cells(scene.grid, scene.boundary, scene.obstacle ? &*scene.obstacle : nullptr);
    return scene;
}

}  // namespace brt
