#include "brt/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace brt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw Error(Errc::InvalidConfig, "bad value '" + value + "' for " + key);
}

double to_real(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        bad_value(key, value);
    }
    if (pos != value.size() || !std::isfinite(v)) bad_value(key, value);
    return v;
}

long long to_integer(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &pos);
    } catch (const std::exception&) {
        bad_value(key, value);
    }
    if (pos != value.size()) bad_value(key, value);
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    bad_value(key, value);
}

std::string real_text(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(Errc::InvalidConfig, msg); };
    if (grid_n <= 0) fail("grid.n must be positive");
    if (!(grid_d > 0.0)) fail("grid.d must be positive");
    if (!(radius > 0.0)) fail("boundary.radius must be positive");
    if (radius > 0.5 * grid_n * grid_d) fail("boundary.radius exceeds the grid half-extent");
    if (obstacle_shape != "square" && obstacle_shape != "none") fail("obstacle.shape must be square or none");
    if (has_obstacle()) {
        if (side_cells <= 0) fail("obstacle.side_cells must be positive");
        const double side = side_cells * grid_d;
        if (!(side < 2.0 * radius) || !(side * std::sqrt(0.5) < radius)) {
            fail("obstacle does not fit strictly inside the observation circle");
        }
    }
    if (n_tx < 2 || n_rx < 2) fail("stations.n_tx and stations.n_rx must be at least 2");
    if (!(phantom_k > 0.0)) fail("phantom.k must be positive");
    if (n_total < 1 && !enumerate) fail("rays.n_total must be at least 1");
    if (!(fraction_unbroken >= 0.0 && fraction_unbroken <= 1.0)) fail("rays.fraction_unbroken must be in [0, 1]");
    if (enumerate && fraction_unbroken != 1.0) fail("rays.enumerate requires rays.fraction_unbroken=1");
    if (!has_obstacle() && fraction_unbroken != 1.0) fail("broken rays need an obstacle");
    if (!(min_chord_cells >= 0.0)) fail("rays.min_chord_cells must be non-negative");
    if (radius_euclidean < 0.0 || radius_max < 0.0) fail("solver radii must be non-negative");
    if (required_consecutive < 2) fail("solver.required_consecutive must be at least 2");
    if (max_sweeps < 1) fail("solver.max_sweeps must be positive");
    if (!(relaxation > 0.0 && relaxation <= 2.0)) fail("solver.relaxation must be in (0, 2]");
    if (supersample < 1) fail("forward.supersample must be at least 1");
}

void set_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "label") {
        cfg.label = value;
    } else if (key == "grid.n") {
        cfg.grid_n = static_cast<int>(to_integer(key, value));
    } else if (key == "grid.d") {
        cfg.grid_d = to_real(key, value);
    } else if (key == "boundary.radius") {
        cfg.radius = to_real(key, value);
    } else if (key == "obstacle.shape") {
        cfg.obstacle_shape = value;
    } else if (key == "obstacle.side_cells") {
        cfg.side_cells = static_cast<int>(to_integer(key, value));
    } else if (key == "stations.n_tx") {
        cfg.n_tx = static_cast<int>(to_integer(key, value));
    } else if (key == "stations.n_rx") {
        cfg.n_rx = static_cast<int>(to_integer(key, value));
    } else if (key == "phantom.k") {
        cfg.phantom_k = to_real(key, value);
    } else if (key == "rays.n_total") {
        const long long n = to_integer(key, value);
        if (n < 0) bad_value(key, value);
        cfg.n_total = static_cast<std::size_t>(n);
    } else if (key == "rays.fraction_unbroken") {
        cfg.fraction_unbroken = to_real(key, value);
    } else if (key == "rays.seed") {
        const long long s = to_integer(key, value);
        if (s < 0) bad_value(key, value);
        cfg.seed = static_cast<std::uint64_t>(s);
    } else if (key == "rays.enumerate") {
        cfg.enumerate = to_bool(key, value);
    } else if (key == "rays.pairing") {
        if (value == "ordered") cfg.pairing = PairConvention::Ordered;
        else if (value == "unordered") cfg.pairing = PairConvention::Unordered;
        else bad_value(key, value);
    } else if (key == "rays.min_chord_cells") {
        cfg.min_chord_cells = to_real(key, value);
    } else if (key == "rays.receiver") {
        if (value == "continuous") cfg.receiver = ReceiverModel::Continuous;
        else if (value == "snap") cfg.receiver = ReceiverModel::SnapToStation;
        else bad_value(key, value);
    } else if (key == "solver.radius_euclidean") {
        cfg.radius_euclidean = to_real(key, value);
    } else if (key == "solver.radius_max") {
        cfg.radius_max = to_real(key, value);
    } else if (key == "solver.required_consecutive") {
        cfg.required_consecutive = static_cast<int>(to_integer(key, value));
    } else if (key == "solver.max_sweeps") {
        cfg.max_sweeps = static_cast<int>(to_integer(key, value));
    } else if (key == "solver.relaxation") {
        cfg.relaxation = to_real(key, value);
    } else if (key == "forward.supersample") {
        cfg.supersample = static_cast<int>(to_integer(key, value));
    } else if (key == "outputs.csv_path") {
        cfg.csv_path = value;
    } else if (key == "outputs.image_dir") {
        cfg.image_dir = value;
    } else if (key == "outputs.images") {
        cfg.write_images = to_bool(key, value);
    } else {
        throw Error(Errc::InvalidConfig, "unknown key '" + key + "'");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(Errc::InvalidConfig, "line " + std::to_string(lineno) + ": expected key=value");
        }
        set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IoFailure, "cannot open config " + path.string());
    return parse_config(in);
}

std::string to_config_text(const ExperimentConfig& cfg) {
    std::ostringstream o;
    o << "label=" << cfg.label << '\n'
      << "grid.n=" << cfg.grid_n << '\n'
      << "grid.d=" << real_text(cfg.grid_d) << '\n'
      << "boundary.radius=" << real_text(cfg.radius) << '\n'
      << "obstacle.shape=" << cfg.obstacle_shape << '\n'
      << "obstacle.side_cells=" << cfg.side_cells << '\n'
      << "stations.n_tx=" << cfg.n_tx << '\n'
      << "stations.n_rx=" << cfg.n_rx << '\n'
      << "phantom.k=" << real_text(cfg.phantom_k) << '\n'
      << "rays.n_total=" << cfg.n_total << '\n'
      << "rays.fraction_unbroken=" << real_text(cfg.fraction_unbroken) << '\n'
      << "rays.seed=" << cfg.seed << '\n'
      << "rays.enumerate=" << (cfg.enumerate ? "true" : "false") << '\n'
      << "rays.pairing=" << (cfg.pairing == PairConvention::Ordered ? "ordered" : "unordered") << '\n'
      << "rays.min_chord_cells=" << real_text(cfg.min_chord_cells) << '\n'
      << "rays.receiver=" << (cfg.receiver == ReceiverModel::Continuous ? "continuous" : "snap") << '\n'
      << "solver.radius_euclidean=" << real_text(cfg.radius_euclidean) << '\n'
      << "solver.radius_max=" << real_text(cfg.radius_max) << '\n'
      << "solver.required_consecutive=" << cfg.required_consecutive << '\n'
      << "solver.max_sweeps=" << cfg.max_sweeps << '\n'
      << "solver.relaxation=" << real_text(cfg.relaxation) << '\n'
      << "forward.supersample=" << cfg.supersample << '\n'
      << "outputs.csv_path=" << cfg.csv_path << '\n'
      << "outputs.image_dir=" << cfg.image_dir << '\n'
      << "outputs.images=" << (cfg.write_images ? "true" : "false") << '\n';
    return o.str();
}

}  // namespace brt
