#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "brt/geometry.hpp"

namespace brt {

/// Per-cell slowness, row-major over the grid; zero outside the region.
struct ImageVector {
    int n = 0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double max_abs() const;
};

enum class PhantomKind { Cone };

/// f(x, y) = K * |(x, y) - center|.
struct PhantomSpec {
    PhantomKind kind = PhantomKind::Cone;
    double k = 1e-6;
    Vec2 center;

    double operator()(Vec2 p) const;
};

using Field2D = std::function<double(Vec2)>;

/// Samples the field at Region cell centers; other cells are 0.
ImageVector discretize(const PhantomSpec& spec, const Scene& scene);
ImageVector discretize(const Field2D& field, const Scene& scene);

/// Zeroes every non-Region cell.
void apply_mask(ImageVector& image, const CellMask& mask);

/// Mean |f_true - x| over Region cells. Throws DimensionMismatch or EmptyRegion.
double avg_error_per_cell(const ImageVector& f_true, const ImageVector& x, const CellMask& mask);

enum class Norm { Euclidean, Max };

double error_norm(const ImageVector& f_true, const ImageVector& x, const CellMask& mask, Norm norm);

/// Binary P5 bytes, N x N, image row 0 = top grid row. Region values map
/// linearly min->0, max->255 (all 0 when constant); Obstacle cells are 0 and
/// Exterior cells 255.
std::vector<std::uint8_t> render_pgm(const ImageVector& x, const Scene& scene);
void export_pgm(const ImageVector& x, const Scene& scene, const std::filesystem::path& path);

}  // namespace brt
