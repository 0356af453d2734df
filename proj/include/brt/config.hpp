#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "brt/rays.hpp"

namespace brt {

/// One experiment. Defaults are the reference configuration: 64x64 cells of
/// size 13, circle radius 350, 30-cell square obstacle, 512 transmitters and
/// receivers, 126050 rays.
struct ExperimentConfig {
    std::string label = "run";

    int grid_n = 64;
    double grid_d = 13.0;
    double radius = 350.0;

    std::string obstacle_shape = "square";  // square | none
    int side_cells = 30;

    int n_tx = 512;
    int n_rx = 512;

    double phantom_k = 1e-6;

    std::size_t n_total = 126050;
    double fraction_unbroken = 0.5;
    std::uint64_t seed = 1;
    bool enumerate = false;  // all admissible chords instead of a sample (fraction 1 only)
    PairConvention pairing = PairConvention::Ordered;
    double min_chord_cells = 1.0;
    ReceiverModel receiver = ReceiverModel::Continuous;

    // Zero radii select the scale-relative defaults computed from the phantom.
    double radius_euclidean = 0.0;
    double radius_max = 0.0;
    int required_consecutive = 2;
    int max_sweeps = 500;
    double relaxation = 1.0;

    int supersample = 1;  // >1 generates travel times on a refined grid

    std::string csv_path = "results.csv";
    std::string image_dir = "images";
    bool write_images = true;

    bool has_obstacle() const { return obstacle_shape != "none"; }
    double obstacle_side() const { return has_obstacle() ? side_cells * grid_d : 0.0; }

    /// Throws InvalidConfig.
    void validate() const;
};

/// Applies one `key=value` assignment. Throws InvalidConfig on unknown keys or bad values.
void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key=value` lines; `#` starts a comment. The result is not validated.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical key=value serialization (round-trips through parse_config).
std::string to_config_text(const ExperimentConfig& cfg);

}  // namespace brt
