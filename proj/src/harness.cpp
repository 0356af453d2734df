#include "brt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <ostream>
#include <thread>

namespace brt {

namespace {

std::vector<std::uint64_t> seeds_or_default(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds) {
    return seeds.empty() ? std::vector<std::uint64_t>{cfg.seed} : seeds;
}

std::string fixed(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

}  // namespace

Scene build_scene(const ExperimentConfig& cfg, const PipelineOverrides& overrides) {
    std::optional<Obstacle> obstacle;
    if (overrides.replace_obstacle) {
        obstacle = overrides.obstacle;
    } else if (cfg.has_obstacle()) {
        obstacle = Obstacle::square({0.0, 0.0}, cfg.obstacle_side());
    }
    return make_scene(cfg.grid_n, cfg.grid_d, cfg.radius, std::move(obstacle));
}

RayRules ray_rules(const ExperimentConfig& cfg) {
    RayRules rules;
    rules.pairing = cfg.pairing;
    rules.min_chord_length = cfg.min_chord_cells * cfg.grid_d;
    rules.receiver = cfg.receiver;
    return rules;
}

RaySet build_rays(const ExperimentConfig& cfg, const Scene& scene) {
    const StationLayout layout = place_stations(scene.boundary, cfg.n_tx, cfg.n_rx);
    if (cfg.enumerate) {
        RaySet all = enumerate_unbroken(scene, layout, ray_rules(cfg));
        all.seed = cfg.seed;
        all.fraction_unbroken = 1.0;
        return all;
    }
    return sample_ray_set(scene, layout, cfg.n_total, cfg.fraction_unbroken, cfg.seed, ray_rules(cfg));
}

RaySystem build_system(const ExperimentConfig& cfg, const Scene& scene, const RaySet& rays, const ImageVector& truth,
                       const Field2D& field) {
    if (cfg.supersample > 1) return assemble_supersampled(scene, rays, field, cfg.supersample);
    return assemble(scene, rays, truth.values);
}

SolveOptions solve_options(const ExperimentConfig& cfg, const Scene& scene, double f_scale) {
    if (!(f_scale > 0.0)) f_scale = 1.0;
    SolveOptions opts;
    opts.radius_euclidean = cfg.radius_euclidean > 0.0
                                ? cfg.radius_euclidean
                                : 1e-6 * std::sqrt(static_cast<double>(scene.region_count())) * f_scale;
    opts.radius_max = cfg.radius_max > 0.0 ? cfg.radius_max : 1e-6 * f_scale;
    opts.required_consecutive = cfg.required_consecutive;
    opts.max_sweeps = cfg.max_sweeps;
    opts.relaxation = cfg.relaxation;
    return opts;
}

ExperimentOutcome run_pipeline(const ExperimentConfig& cfg, const PipelineOverrides& overrides) {
    cfg.validate();
    Scene scene = build_scene(cfg, overrides);
    const PhantomSpec cone{PhantomKind::Cone, cfg.phantom_k, scene.boundary.center};
    const Field2D field = overrides.field ? overrides.field : Field2D([cone](Vec2 p) { return cone(p); });
    ImageVector truth = discretize(field, scene);

    const RaySet rays = build_rays(cfg, scene);
    const RaySystem system = build_system(cfg, scene, rays, truth, field);
    SolveReport report = solve(system, solve_options(cfg, scene, truth.max_abs()));

    ImageVector reconstruction{scene.grid.cells_per_row, report.solution};
    ExperimentRow row;
    row.label = cfg.label;
    row.n_rays = system.rows();
    row.fraction_unbroken = cfg.enumerate ? 1.0 : cfg.fraction_unbroken;
    row.obstacle_side = scene.obstacle ? cfg.obstacle_side() : 0.0;
    row.error = avg_error_per_cell(truth, reconstruction, scene.mask);
    row.iterations = report.iterations;
    row.converged = report.converged;
    row.seed = cfg.seed;
    return ExperimentOutcome{std::move(row),        std::move(scene),  std::move(truth),
                             std::move(reconstruction), std::move(report), system.dropped};
}

std::string image_stem(const ExperimentRow& row) { return row.label + "_seed" + std::to_string(row.seed); }

ExperimentRow run_single(const ExperimentConfig& cfg) {
    ExperimentOutcome out = run_pipeline(cfg);
    if (cfg.write_images) {
        const std::filesystem::path dir(cfg.image_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string());
        const std::string stem = image_stem(out.row);
        export_pgm(out.truth, out.scene, dir / (stem + "_original.pgm"));
        export_pgm(out.reconstruction, out.scene, dir / (stem + "_reconstructed.pgm"));
    }
    return out.row;
}

std::vector<ExperimentRow> run_batch(const std::vector<ExperimentConfig>& configs, unsigned threads) {
    std::vector<ExperimentRow> rows(configs.size());
    std::vector<std::exception_ptr> errors(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < configs.size(); k = next++) {
            try {
                rows[k] = run_single(configs[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(configs.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

std::vector<ExperimentConfig> table1_configs(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds) {
    std::vector<ExperimentConfig> configs;
    for (std::uint64_t seed : seeds_or_default(cfg, seeds)) {
        ExperimentConfig art = cfg;
        art.label = "art";
        art.seed = seed;
        art.fraction_unbroken = 1.0;
        art.enumerate = false;
        ExperimentConfig brt = art;
        brt.label = "brt";
        brt.fraction_unbroken = 0.5;
        configs.push_back(art);
        configs.push_back(brt);
    }
    return configs;
}

std::vector<ExperimentConfig> table2_configs(const ExperimentConfig& cfg, const std::vector<double>& fractions,
                                            const std::vector<std::uint64_t>& seeds) {
    std::vector<ExperimentConfig> configs;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        const double f = fractions[i];
        if (!(f >= 0.0 && f <= 1.0)) throw Error(Errc::InvalidConfig, "fraction outside [0, 1]");
        const std::vector<std::uint64_t> row_seeds = seeds.empty() ? std::vector<std::uint64_t>{cfg.seed + i} : seeds;
        for (std::uint64_t seed : row_seeds) {
            ExperimentConfig c = cfg;
            c.label = "brt_f" + fixed(f, 2);
            c.seed = seed;
            c.fraction_unbroken = f;
            c.enumerate = false;
            configs.push_back(c);
        }
    }
    return configs;
}

std::vector<ExperimentConfig> table3_configs(const ExperimentConfig& cfg, const std::vector<int>& side_cells,
                                            const std::vector<std::uint64_t>& seeds) {
    std::vector<ExperimentConfig> configs;
    for (int side : side_cells) {
        for (std::uint64_t seed : seeds_or_default(cfg, seeds)) {
            ExperimentConfig art = cfg;
            art.obstacle_shape = "square";
            art.side_cells = side;
            art.seed = seed;
            art.enumerate = false;
            art.fraction_unbroken = 1.0;
            const std::string units = fixed(side * cfg.grid_d, 0);
            art.label = "art_side" + units;
            art.validate();
            ExperimentConfig brt = art;
            brt.fraction_unbroken = 0.5;
            brt.label = "brt_side" + units;
            configs.push_back(art);
            configs.push_back(brt);
        }
    }
    return configs;
}

std::vector<ExperimentRow> run_table1(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                      unsigned threads) {
    return run_batch(table1_configs(cfg, seeds), threads);
}

std::vector<ExperimentRow> run_table2(const ExperimentConfig& cfg, const std::vector<double>& fractions,
                                      const std::vector<std::uint64_t>& seeds, unsigned threads) {
    return run_batch(table2_configs(cfg, fractions, seeds), threads);
}

std::vector<ExperimentRow> run_table3(const ExperimentConfig& cfg, const std::vector<int>& side_cells,
                                      const std::vector<std::uint64_t>& seeds, unsigned threads) {
    return run_batch(table3_configs(cfg, side_cells, seeds), threads);
}

std::vector<double> reference_fractions() {
    std::vector<double> f;
    for (int k = 10; k <= 19; ++k) f.push_back(k * 0.05);
    return f;
}

std::vector<int> reference_side_cells() {
    std::vector<int> s;
    for (int c = 10; c <= 28; c += 2) s.push_back(c);
    return s;
}

ExperimentRow average_row(const std::vector<ExperimentRow>& rows) {
    ExperimentRow avg;
    avg.label = "average";
    if (rows.empty()) return avg;
    double n_rays = 0.0;
    double iterations = 0.0;
    avg.converged = true;
    for (const ExperimentRow& r : rows) {
        n_rays += static_cast<double>(r.n_rays);
        avg.fraction_unbroken += r.fraction_unbroken;
        avg.obstacle_side += r.obstacle_side;
        avg.error += r.error;
        iterations += static_cast<double>(r.iterations);
        avg.converged = avg.converged && r.converged;
    }
    const double n = static_cast<double>(rows.size());
    avg.n_rays = static_cast<std::size_t>(std::llround(n_rays / n));
    avg.fraction_unbroken /= n;
    avg.obstacle_side /= n;
    avg.error /= n;
    avg.iterations = static_cast<std::size_t>(std::llround(iterations / n));
    return avg;
}

std::vector<ExperimentRow> averages_by_fraction(const std::vector<ExperimentRow>& rows) {
    std::vector<double> keys;
    for (const ExperimentRow& r : rows) {
        if (std::find(keys.begin(), keys.end(), r.fraction_unbroken) == keys.end()) keys.push_back(r.fraction_unbroken);
    }
    std::vector<ExperimentRow> out;
    for (double k : keys) {
        std::vector<ExperimentRow> group;
        for (const ExperimentRow& r : rows) {
            if (r.fraction_unbroken == k) group.push_back(r);
        }
        out.push_back(average_row(group));
    }
    return out;
}

std::string csv_line(const ExperimentRow& row) {
    return row.label + "," + std::to_string(row.n_rays) + "," + sci(row.fraction_unbroken) + "," +
           sci(row.obstacle_side) + "," + sci(row.error) + "," + std::to_string(row.iterations) + "," +
           (row.converged ? "true" : "false") + "," + std::to_string(row.seed);
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
    out << kCsvHeader << '\n';
    for (const ExperimentRow& r : rows) out << csv_line(r) << '\n';
    if (!out) throw Error(Errc::IoFailure, "failed writing CSV");
}

}  // namespace brt
