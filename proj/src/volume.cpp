#include "brt/volume.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

namespace brt {

namespace {

std::string z_text(double z) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", z);
    return buf;
}

VolumeSlice solve_slice(const VolumeSpec& spec, std::size_t k) {
    const double z = spec.z_slices[k];
    ExperimentConfig cfg = spec.base;
    cfg.label = "slice_" + std::to_string(k);
    PipelineOverrides overrides;
    overrides.replace_obstacle = true;
    overrides.obstacle = spec.cross_sections[k];
    if (!overrides.obstacle) {
        cfg.fraction_unbroken = 1.0;
        cfg.obstacle_shape = "none";
    }
    const auto& phantom = spec.phantom;
    overrides.field = [&phantom, z](Vec2 p) { return phantom(Vec3{p.x, p.y, z}); };
    try {
        ExperimentOutcome out = run_pipeline(cfg, overrides);
        return VolumeSlice{z, std::move(out.reconstruction), std::move(out.row), std::move(out.scene)};
    } catch (const Error& e) {
        throw Error(e.code(), "slice z=" + z_text(z) + ": " + e.what());
    }
}

}  // namespace

VolumeSpec prism_volume(const ExperimentConfig& base, std::vector<double> z_slices,
                        std::function<double(Vec3)> phantom) {
    VolumeSpec spec{base, std::move(z_slices), std::move(phantom), {}};
    const std::optional<Obstacle> section =
        base.has_obstacle() ? std::optional<Obstacle>(Obstacle::square({0.0, 0.0}, base.obstacle_side()))
                            : std::nullopt;
    spec.cross_sections.assign(spec.z_slices.size(), section);
    return spec;
}

std::function<double(Vec3)> extruded_cone(const ExperimentConfig& base) {
    const PhantomSpec cone{PhantomKind::Cone, base.phantom_k, {0.0, 0.0}};
    return [cone](Vec3 p) { return cone(Vec2{p.x, p.y}); };
}

bool check_z_independence(const VolumeSpec& spec) {
    const Obstacle* first = nullptr;
    for (const auto& section : spec.cross_sections) {
        if (!section) continue;
        if (first == nullptr) {
            first = &*section;
        } else if (!same_polygon(*first, *section, 1e-12)) {
            return false;
        }
    }
    return true;
}

VolumeResult solve_volume(const VolumeSpec& spec, unsigned threads) {
    if (spec.z_slices.empty()) throw Error(Errc::InvalidArgument, "volume has no slices");
    if (spec.cross_sections.size() != spec.z_slices.size()) {
        throw Error(Errc::InvalidArgument, "one obstacle cross-section per slice is required");
    }
    if (!spec.phantom) throw Error(Errc::InvalidArgument, "volume phantom is not set");
    for (std::size_t a = 0; a < spec.z_slices.size(); ++a) {
        for (std::size_t b = a + 1; b < spec.z_slices.size(); ++b) {
            if (spec.z_slices[a] == spec.z_slices[b]) throw Error(Errc::InvalidArgument, "slice planes must be distinct");
        }
    }
    if (!check_z_independence(spec)) {
        throw Error(Errc::ZDependentObstacle, "obstacle cross-section varies with z");
    }

    const std::size_t n = spec.z_slices.size();
    std::vector<std::optional<VolumeSlice>> slices(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            try {
                slices[k] = solve_slice(spec, k);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    VolumeResult result;
    for (auto& s : slices) result.slices.push_back(std::move(*s));
    return result;
}

void export_volume(const VolumeResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoFailure, "cannot create " + dir.string());
    std::ofstream manifest(dir / "manifest.txt", std::ios::trunc);
    if (!manifest) throw Error(Errc::IoFailure, "cannot write manifest in " + dir.string());
    for (std::size_t k = 0; k < result.slices.size(); ++k) {
        const VolumeSlice& s = result.slices[k];
        export_pgm(s.image, s.scene, dir / ("slice_" + std::to_string(k) + "_" + z_text(s.z) + ".pgm"));
        manifest << z_text(s.z) << '\n';
    }
    if (!manifest) throw Error(Errc::IoFailure, "failed writing manifest");
}

Vec3 reflect3(Vec3 dir, Vec3 normal) { return dir - (2.0 * dot(dir, normal)) * normal; }

}  // namespace brt
