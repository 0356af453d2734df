#include "brt/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

namespace brt {

namespace {

void check_pair(const ImageVector& a, const ImageVector& b, const CellMask& mask) {
    if (a.size() != b.size() || a.size() != mask.size() || a.n != b.n) {
        throw Error(Errc::DimensionMismatch, "image vectors are bound to different grids");
    }
}

}  // namespace

double ImageVector::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double PhantomSpec::operator()(Vec2 p) const { return k * distance(p, center); }

ImageVector discretize(const Field2D& field, const Scene& scene) {
    ImageVector out{scene.grid.cells_per_row, std::vector<double>(scene.mask.size(), 0.0)};
    for (std::int32_t c = 0; c < scene.grid.cell_count(); ++c) {
        if (scene.is_region(c)) out.values[c] = field(scene.grid.cell_center(c));
    }
    return out;
}

ImageVector discretize(const PhantomSpec& spec, const Scene& scene) {
    return discretize(Field2D([&spec](Vec2 p) { return spec(p); }), scene);
}

void apply_mask(ImageVector& image, const CellMask& mask) {
    for (std::size_t c = 0; c < image.values.size(); ++c) {
        if (mask[c] != CellClass::Region) image.values[c] = 0.0;
    }
}

double avg_error_per_cell(const ImageVector& f_true, const ImageVector& x, const CellMask& mask) {
    check_pair(f_true, x, mask);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < mask.size(); ++c) {
        if (mask[c] != CellClass::Region) continue;
        sum += std::abs(f_true.values[c] - x.values[c]);
        ++count;
    }
    if (count == 0) throw Error(Errc::EmptyRegion, "no region cells");
    return sum / static_cast<double>(count);
}

double error_norm(const ImageVector& f_true, const ImageVector& x, const CellMask& mask, Norm norm) {
    check_pair(f_true, x, mask);
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < mask.size(); ++c) {
        if (mask[c] != CellClass::Region) continue;
        const double d = std::abs(f_true.values[c] - x.values[c]);
        acc = norm == Norm::Max ? std::max(acc, d) : acc + d * d;
        ++count;
    }
    if (count == 0) throw Error(Errc::EmptyRegion, "no region cells");
    return norm == Norm::Max ? acc : std::sqrt(acc);
}

std::vector<std::uint8_t> render_pgm(const ImageVector& x, const Scene& scene) {
    const int n = scene.grid.cells_per_row;
    if (x.size() != scene.mask.size()) throw Error(Errc::DimensionMismatch, "image does not match the scene");
    double lo = INFINITY;
    double hi = -INFINITY;
    for (std::size_t c = 0; c < scene.mask.size(); ++c) {
        if (scene.mask[c] != CellClass::Region) continue;
        lo = std::min(lo, x.values[c]);
        hi = std::max(hi, x.values[c]);
    }
    const std::string header = "P5\n" + std::to_string(n) + " " + std::to_string(n) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.reserve(header.size() + scene.mask.size());
    const double range = hi - lo;
    for (int r = 0; r < n; ++r) {
        const int j = n - 1 - r;
        for (int i = 0; i < n; ++i) {
            const std::int32_t c = scene.grid.index(i, j);
            std::uint8_t px = 0;
            switch (scene.mask[c]) {
                case CellClass::Obstacle: px = 0; break;
                case CellClass::Exterior: px = 255; break;
                case CellClass::Region:
                    px = range > 0.0 ? static_cast<std::uint8_t>(
                                           std::lround(std::clamp((x.values[c] - lo) / range, 0.0, 1.0) * 255.0))
                                     : 0;
                    break;
            }
            bytes.push_back(px);
        }
    }
    return bytes;
}

void export_pgm(const ImageVector& x, const Scene& scene, const std::filesystem::path& path) {
    const std::vector<std::uint8_t> bytes = render_pgm(x, scene);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot open " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::IoFailure, "failed writing " + path.string());
}

}  // namespace brt
