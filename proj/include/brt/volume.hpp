#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "brt/harness.hpp"

namespace brt {

/// A 3D problem solved plane by plane. Each z slice gets the 2D problem of
/// `base`, the slowness phantom(x, y, z) and its own obstacle cross-section
/// (nullopt for planes that miss the obstacle).
struct VolumeSpec {
    ExperimentConfig base;
    std::vector<double> z_slices;
    std::function<double(Vec3)> phantom;
    std::vector<std::optional<Obstacle>> cross_sections;
};

struct VolumeSlice {
    double z = 0.0;
    ImageVector image;
    ExperimentRow row;
    Scene scene;
};

struct VolumeResult {
    std::vector<VolumeSlice> slices;
};

/// Prism: the base config's square obstacle in every slice.
VolumeSpec prism_volume(const ExperimentConfig& base, std::vector<double> z_slices,
                        std::function<double(Vec3)> phantom);

/// True iff every obstacle cross-section has the same vertex list within
/// 1e-12, so the boundary normal has no z component and reflections stay in
/// their plane.
bool check_z_independence(const VolumeSpec& spec);

/// Cone phantom of the base config, independent of z.
std::function<double(Vec3)> extruded_cone(const ExperimentConfig& base);

/// The 2D pipeline per slice; slices that miss the obstacle use chords only.
/// Throws ZDependentObstacle, and rethrows slice failures tagged with z.
VolumeResult solve_volume(const VolumeSpec& spec, unsigned threads = 1);

/// Writes slice_<index>_<z>.pgm per slice and manifest.txt with one z per line.
void export_volume(const VolumeResult& result, const std::filesystem::path& dir);

/// 3D specular reflection dir - 2(dir.n)n.
Vec3 reflect3(Vec3 dir, Vec3 normal);

}  // namespace brt
