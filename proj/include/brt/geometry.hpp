#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "brt/error.hpp"
#include "brt/vec2.hpp"

namespace brt {

inline constexpr double kGrazeEpsilon = 1e-9;
// Relative to the cell size in a Scene; absolute for the free functions below.
inline constexpr double kOnBoundaryEpsilon = 1e-9;

/// Square grid of N x N axis-aligned cells. Cell (i, j) covers
/// [origin.x + i*d, origin.x + (i+1)*d) x [origin.y + j*d, origin.y + (j+1)*d)
/// and has linear index j*N + i.
struct Grid {
    Vec2 origin;
    int cells_per_row = 0;
    double cell_size = 0.0;

    std::int32_t cell_count() const { return cells_per_row * cells_per_row; }
    std::int32_t index(int i, int j) const { return j * cells_per_row + i; }
    int column(std::int32_t cell) const { return cell % cells_per_row; }
    int row(std::int32_t cell) const { return cell / cells_per_row; }
    double extent() const { return cells_per_row * cell_size; }
    Vec2 upper() const { return origin + Vec2{extent(), extent()}; }
    Vec2 cell_center(std::int32_t cell) const {
        return origin + Vec2{(column(cell) + 0.5) * cell_size, (row(cell) + 0.5) * cell_size};
    }
};

struct CircleBoundary {
    Vec2 center;
    double radius = 0.0;

    bool strictly_contains(Vec2 p) const { return distance(p, center) < radius; }
};

/// Convex polygonal reflecting obstacle. Vertices are stored counter-clockwise;
/// a clockwise input is reversed on construction.
class Obstacle {
  public:
    explicit Obstacle(std::vector<Vec2> vertices);

    static Obstacle square(Vec2 center, double side);
    static Obstacle regular_polygon(Vec2 center, double circumradius, int sides);

    std::span<const Vec2> vertices() const { return vertices_; }
    std::size_t edge_count() const { return vertices_.size(); }
    Vec2 edge_start(std::size_t e) const { return vertices_[e]; }
    Vec2 edge_end(std::size_t e) const { return vertices_[(e + 1) % vertices_.size()]; }
    Vec2 edge_normal(std::size_t e) const { return normals_[e]; }
    double perimeter() const { return perimeter_; }
    double area() const;
    Vec2 centroid() const;

    /// Signed distance of p to the supporting line of edge e (positive outside).
    double edge_offset(std::size_t e, Vec2 p) const { return dot(normals_[e], p - vertices_[e]); }

    bool contains_closed(Vec2 p) const;
    bool contains_strict(Vec2 p) const;

    /// Boundary point at arc length s from vertex 0, walking counter-clockwise.
    /// s is reduced modulo the perimeter.
    Vec2 point_at(double s) const;
    std::size_t edge_at(double s) const;

    /// Largest distance from c to any vertex.
    double max_distance_from(Vec2 c) const;

  private:
    std::vector<Vec2> vertices_;
    std::vector<Vec2> normals_;
    std::vector<double> cumulative_;  // arc length at the start of each edge
    double perimeter_ = 0.0;
};

/// Vertex lists equal element-wise within tol.
bool same_polygon(const Obstacle& a, const Obstacle& b, double tol);

enum class CellClass : std::uint8_t { Obstacle, Exterior, Region };

using CellMask = std::vector<CellClass>;

CellMask classify_cells(const Grid& grid, const CircleBoundary& boundary, const Obstacle* obstacle);
inline CellMask classify_cells(const Grid& grid, const CircleBoundary& boundary, const Obstacle& obstacle) {
    return classify_cells(grid, boundary, &obstacle);
}

/// Specular reflection of dir about the surface normal: dir - 2(dir.n)n.
/// Throws GrazingIncidence when |dir.n| < kGrazeEpsilon.
Vec2 reflect(Vec2 dir, Vec2 normal);

/// Unit outward normal of the edge containing p. Throws CornerPoint within
/// 1e-9*perimeter of a vertex and NotOnBoundary when p is farther than eps_on
/// from every edge.
Vec2 outward_normal(const Obstacle& obstacle, Vec2 p, double eps_on = kOnBoundaryEpsilon);

/// True iff the open segment (a, b) penetrates the polygon interior by more
/// than eps_on. Touching the boundary or running along an edge is not blocking.
bool segment_blocked(Vec2 a, Vec2 b, const Obstacle& obstacle, double eps_on = kOnBoundaryEpsilon);

/// The point origin + t*dir, t > 0, on the circle. origin must be strictly inside.
Vec2 circle_exit(Vec2 origin, Vec2 dir, const CircleBoundary& boundary);

/// The discretized world: grid, observation circle, optional obstacle and the
/// per-cell class mask. The circle center coincides with the grid center.
struct Scene {
    Grid grid;
    CircleBoundary boundary;
    std::optional<Obstacle> obstacle;
    CellMask mask;

    double eps_on() const { return kOnBoundaryEpsilon * grid.cell_size; }
    std::int32_t region_count() const;
    bool is_region(std::int32_t cell) const { return mask[cell] == CellClass::Region; }
};

/// Builds a scene centered on the origin. Validates that the circle fits in the
/// grid and the obstacle lies strictly inside the circle.
Scene make_scene(int cells_per_row, double cell_size, double radius, std::optional<Obstacle> obstacle);

}  // namespace brt
