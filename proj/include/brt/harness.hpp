#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "brt/config.hpp"
#include "brt/phantom.hpp"
#include "brt/solver.hpp"

namespace brt {

struct ExperimentRow {
    std::string label;
    std::size_t n_rays = 0;
    double fraction_unbroken = 0.0;
    double obstacle_side = 0.0;
    double error = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;

    friend bool operator==(const ExperimentRow&, const ExperimentRow&) = default;
};

/// Replaces parts of the configured problem; used by plane-cut volume runs.
struct PipelineOverrides {
    bool replace_obstacle = false;
    std::optional<Obstacle> obstacle;  // used when replace_obstacle
    Field2D field;                     // empty: cone phantom from the config
};

struct ExperimentOutcome {
    ExperimentRow row;
    Scene scene;
    ImageVector truth;
    ImageVector reconstruction;
    SolveReport report;
    std::size_t dropped_rays = 0;
};

Scene build_scene(const ExperimentConfig& cfg, const PipelineOverrides& overrides = {});
RayRules ray_rules(const ExperimentConfig& cfg);
RaySet build_rays(const ExperimentConfig& cfg, const Scene& scene);
RaySystem build_system(const ExperimentConfig& cfg, const Scene& scene, const RaySet& rays, const ImageVector& truth,
                       const Field2D& field);

/// Radii from the config, or 1e-6*sqrt(region cells)*f_scale and 1e-6*f_scale
/// when they are left at 0.
SolveOptions solve_options(const ExperimentConfig& cfg, const Scene& scene, double f_scale);

/// Scene, stations, rays, W and T, Kaczmarz solve and error. No file output.
ExperimentOutcome run_pipeline(const ExperimentConfig& cfg, const PipelineOverrides& overrides = {});

/// run_pipeline plus original/reconstructed PGM images when enabled.
ExperimentRow run_single(const ExperimentConfig& cfg);

std::string image_stem(const ExperimentRow& row);

/// Runs independent experiments on up to `threads` workers; results come back
/// in submission order.
std::vector<ExperimentRow> run_batch(const std::vector<ExperimentConfig>& configs, unsigned threads = 1);

/// ART (all unbroken) then BRT (50/50) per seed, same scene and solver options.
std::vector<ExperimentRow> run_table1(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds = {},
                                      unsigned threads = 1);
/// One row per (fraction, seed), fraction-major. Without explicit seeds the
/// i-th fraction runs with seed cfg.seed + i.
std::vector<ExperimentRow> run_table2(const ExperimentConfig& cfg, const std::vector<double>& fractions,
                                      const std::vector<std::uint64_t>& seeds = {}, unsigned threads = 1);
/// Per obstacle side (in cells) and seed: an ART row followed by a BRT row.
std::vector<ExperimentRow> run_table3(const ExperimentConfig& cfg, const std::vector<int>& side_cells,
                                      const std::vector<std::uint64_t>& seeds = {}, unsigned threads = 1);

/// The experiment lists behind the three tables, in run order.
std::vector<ExperimentConfig> table1_configs(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds = {});
std::vector<ExperimentConfig> table2_configs(const ExperimentConfig& cfg, const std::vector<double>& fractions,
                                            const std::vector<std::uint64_t>& seeds = {});
std::vector<ExperimentConfig> table3_configs(const ExperimentConfig& cfg, const std::vector<int>& side_cells,
                                            const std::vector<std::uint64_t>& seeds = {});

std::vector<double> reference_fractions();   // 0.50 .. 0.95 step 0.05
std::vector<int> reference_side_cells();  // 10 .. 28 step 2 (130 .. 364 units at d = 13)

/// Means of the numeric columns, labeled `average`.
ExperimentRow average_row(const std::vector<ExperimentRow>& rows);
/// One `average` row per distinct fraction_unbroken, in first-seen order.
std::vector<ExperimentRow> averages_by_fraction(const std::vector<ExperimentRow>& rows);

inline constexpr const char* kCsvHeader = "label,n_rays,fraction_unbroken,obstacle_side,error,iterations,converged,seed";
std::string csv_line(const ExperimentRow& row);
void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

}  // namespace brt
