#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "brt/harness.hpp"

namespace fs = std::filesystem;
using namespace brt;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::vector<std::string> assignments;
    bool dry_run = false;
    unsigned threads = 1;
    std::vector<std::uint64_t> seeds;
    std::vector<double> fractions;
    std::vector<int> side_cells;
    std::string file;
};

ExperimentConfig resolve_config(const Options& o) {
    ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    for (const std::string& a : o.assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw Error(Errc::InvalidConfig, "--set expects key=value, got '" + a + "'");
        set_config_value(cfg, a.substr(0, eq), a.substr(eq + 1));
    }
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out_dir.empty()) {
        const fs::path out(o.out_dir);
        cfg.csv_path = (out / fs::path(cfg.csv_path).filename()).string();
        cfg.image_dir = (out / fs::path(cfg.image_dir).filename()).string();
    }
    return cfg;
}

void validate_all(const std::vector<ExperimentConfig>& configs) {
    for (const ExperimentConfig& c : configs) {
        c.validate();
        build_scene(c);
    }
}

fs::path output_file(const Options& o, const ExperimentConfig& cfg, const char* default_name) {
    if (!o.file.empty()) return o.file;
    const fs::path dir = o.out_dir.empty() ? fs::path(cfg.csv_path).parent_path() : fs::path(o.out_dir);
    return dir / default_name;
}

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) throw Error(Errc::IoFailure, "cannot create " + path.parent_path().string());
    }
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot write " + path.string());
    return out;
}

void report(const ExperimentConfig& cfg, const std::vector<ExperimentRow>& rows) {
    std::ofstream out = open_output(cfg.csv_path);
    write_csv(out, rows);
    std::cout << kCsvHeader << '\n';
    for (const ExperimentRow& r : rows) std::cout << csv_line(r) << '\n';
    std::cout << "wrote " << cfg.csv_path << '\n';
}

int dispatch(const std::string& verb, const Options& o) {
    const ExperimentConfig cfg = resolve_config(o);

    std::vector<ExperimentConfig> plan;
    if (verb == "run" || verb == "export-rays" || verb == "export-system") {
        plan = {cfg};
    } else if (verb == "table1") {
        plan = table1_configs(cfg, o.seeds);
    } else if (verb == "table2") {
        plan = table2_configs(cfg, o.fractions.empty() ? reference_fractions() : o.fractions, o.seeds);
    } else {
        plan = table3_configs(cfg, o.side_cells.empty() ? reference_side_cells() : o.side_cells, o.seeds);
    }
    validate_all(plan);
    if (o.dry_run) {
        std::cout << "valid: " << plan.size() << " experiment(s)\n";
        return 0;
    }

    if (verb == "run") {
        report(cfg, {run_single(cfg)});
    } else if (verb == "table1" || verb == "table3") {
        std::vector<ExperimentRow> rows = run_batch(plan, o.threads);
        for (const ExperimentRow& a : averages_by_fraction(rows)) rows.push_back(a);
        report(cfg, rows);
    } else if (verb == "table2") {
        std::vector<ExperimentRow> rows = run_batch(plan, o.threads);
        rows.push_back(average_row(rows));
        report(cfg, rows);
    } else {
        const Scene scene = build_scene(cfg);
        const RaySet rays = build_rays(cfg, scene);
        const bool rays_only = verb == "export-rays";
        const fs::path path = output_file(o, cfg, rays_only ? "rays.txt" : "system.txt");
        std::ofstream out = open_output(path);
        if (rays_only) {
            write_rays(out, rays);
            std::cout << "wrote " << rays.size() << " rays to " << path.string() << '\n';
        } else {
            const ImageVector truth = discretize(PhantomSpec{PhantomKind::Cone, cfg.phantom_k, {}}, scene);
            const RaySystem system = build_system(cfg, scene, rays, truth, {});
            write_system(out, system);
            std::cout << "wrote " << system.rows() << " rows x " << system.n_cols() << " columns to "
                      << path.string() << '\n';
        }
        if (!out) throw Error(Errc::IoFailure, "failed writing " + path.string());
    }
    return 0;
}

bool is_validation(Errc c) {
    return c == Errc::InvalidConfig || c == Errc::ParseError || c == Errc::InvalidArgument ||
           c == Errc::InvalidGeometry;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Broken-ray travel-time tomography experiments"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config_path, "key=value configuration file")->check(CLI::ExistingFile);
    app.add_option("--seed", o.seed, "override rays.seed");
    app.add_option("--out", o.out_dir, "directory for CSV, images and exports");
    app.add_option("--set", o.assignments, "extra key=value assignment (repeatable)");
    app.add_flag("--dry-run", o.dry_run, "validate the configuration(s) without solving");
    app.add_option("--threads", o.threads, "concurrent experiments")->check(CLI::PositiveNumber);

    auto* run = app.add_subcommand("run", "one experiment");
    auto* t1 = app.add_subcommand("table1", "ART and BRT per seed");
    auto* t2 = app.add_subcommand("table2", "fraction-of-unbroken-rays sweep");
    auto* t3 = app.add_subcommand("table3", "obstacle side sweep");
    auto* er = app.add_subcommand("export-rays", "write the ray set as text");
    auto* es = app.add_subcommand("export-system", "write W and T as text");
    for (auto* t : {t1, t2, t3}) t->add_option("--seeds", o.seeds, "seed list")->delimiter(',');
    t2->add_option("--fractions", o.fractions, "fractions of unbroken rays")->delimiter(',');
    t3->add_option("--side-cells", o.side_cells, "obstacle sides in cells")->delimiter(',');
    for (auto* e : {er, es}) e->add_option("--file", o.file, "output path");
    for (auto* s : {run, t1, t2, t3, er, es}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        return dispatch(app.get_subcommands().front()->get_name(), o);
    } catch (const Error& e) {
        std::cerr << "brt: " << e.what() << '\n';
        return is_validation(e.code()) ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "brt: " << e.what() << '\n';
        return 2;
    }
}
