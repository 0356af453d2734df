#include "brt/projection.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace brt {

namespace {

constexpr double kCornerTouch = 1e-12;

struct Entry {
    std::int32_t cell;
    double weight;
};

// Appends (cell, length) pairs for [a, b] in traversal order.
void traverse_into(const Grid& grid, Vec2 a, Vec2 b, std::vector<Entry>& out) {
    const Vec2 ab = b - a;
    const double length = norm(ab);
    if (length == 0.0) return;

    const Vec2 lo = grid.origin;
    const Vec2 hi = grid.upper();
    double t0 = 0.0;
    double t1 = 1.0;
    const double p[4] = {-ab.x, ab.x, -ab.y, ab.y};
    const double q[4] = {a.x - lo.x, hi.x - a.x, a.y - lo.y, hi.y - a.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) return;
            continue;
        }
        const double r = q[k] / p[k];
        if (p[k] < 0.0) {
            t0 = std::max(t0, r);
        } else {
            t1 = std::min(t1, r);
        }
    }
    if (!(t0 < t1)) return;

    const double d = grid.cell_size;
    const int n = grid.cells_per_row;
    std::vector<double> alphas{t0, t1};
    alphas.reserve(2 * n + 4);
    auto add_planes = [&](double start, double delta, double origin) {
        if (delta == 0.0) return;
        const double u0 = (start + t0 * delta - origin) / d;
        const double u1 = (start + t1 * delta - origin) / d;
        const int k_lo = std::max(0, static_cast<int>(std::ceil(std::min(u0, u1))));
        const int k_hi = std::min(n, static_cast<int>(std::floor(std::max(u0, u1))));
        for (int k = k_lo; k <= k_hi; ++k) {
            const double t = (origin + k * d - start) / delta;
            if (t > t0 && t < t1) alphas.push_back(t);
        }
    };
    add_planes(a.x, ab.x, lo.x);
    add_planes(a.y, ab.y, lo.y);
    std::sort(alphas.begin(), alphas.end());

    const double min_len = kCornerTouch * d;
    for (std::size_t k = 0; k + 1 < alphas.size(); ++k) {
        const double len = (alphas[k + 1] - alphas[k]) * length;
        if (!(len > min_len)) continue;
        const Vec2 mid = a + (0.5 * (alphas[k] + alphas[k + 1])) * ab;
        const int i = std::clamp(static_cast<int>(std::floor((mid.x - lo.x) / d)), 0, n - 1);
        const int j = std::clamp(static_cast<int>(std::floor((mid.y - lo.y) / d)), 0, n - 1);
        out.push_back({grid.index(i, j), len});
    }
}

// Sorts by cell, sums duplicates and keeps entries accepted by `keep`.
template <class Keep>
SparseRow compact(std::vector<Entry>& entries, double min_len, Keep keep) {
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) { return x.cell < y.cell; });
    SparseRow row;
    row.cells.reserve(entries.size());
    row.weights.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size();) {
        const std::int32_t cell = entries[k].cell;
        double w = 0.0;
        for (; k < entries.size() && entries[k].cell == cell; ++k) w += entries[k].weight;
        if (w > min_len && keep(cell)) {
            row.cells.push_back(cell);
            row.weights.push_back(w);
        }
    }
    return row;
}

void append_real(std::ostream& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
}

double parse_real(std::string_view tok, std::size_t lineno) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": bad number '" + std::string(tok) + "'");
    }
    return v;
}

}  // namespace

// Neumaier summation.
double SparseRow::total_weight() const {
    double sum = 0.0;
    double carry = 0.0;
    for (double w : weights) {
        const double t = sum + w;
        carry += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
        sum = t;
    }
    return sum + carry;
}

SparseRow traverse(const Grid& grid, Vec2 a, Vec2 b) {
    std::vector<Entry> entries;
    traverse_into(grid, a, b, entries);
    return compact(entries, kCornerTouch * grid.cell_size, [](std::int32_t) { return true; });
}

std::optional<SparseRow> try_ray_row(const Scene& scene, const RayPath& ray) {
    std::vector<Entry> entries;
    for (const Segment& leg : ray.legs()) traverse_into(scene.grid, leg.a, leg.b, entries);
    SparseRow row = compact(entries, kCornerTouch * scene.grid.cell_size,
                            [&](std::int32_t cell) { return scene.is_region(cell); });
    if (row.empty()) return std::nullopt;
    return row;
}

SparseRow ray_row(const Scene& scene, const RayPath& ray) {
    auto row = try_ray_row(scene, ray);
    if (!row) throw Error(Errc::EmptyRow, "ray crosses no region cell");
    return std::move(*row);
}

void RaySystem::add_row(const SparseRow& row, double time, std::size_t source_ray) {
    if (row.empty()) throw Error(Errc::ZeroRow, "empty rows cannot enter the system");
    double n2 = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (row.cells[k] < 0 || row.cells[k] >= n_cols_) {
            throw Error(Errc::DimensionMismatch, "cell index out of range");
        }
        n2 += row.weights[k] * row.weights[k];
    }
    if (!(n2 > 0.0)) throw Error(Errc::ZeroRow, "row has zero norm");
    cells_.insert(cells_.end(), row.cells.begin(), row.cells.end());
    weights_.insert(weights_.end(), row.weights.begin(), row.weights.end());
    offsets_.push_back(cells_.size());
    times_.push_back(time);
    norms2_.push_back(n2);
    sources_.push_back(source_ray);
}

SparseRowView RaySystem::row(std::size_t j) const {
    const std::size_t b = offsets_[j];
    const std::size_t e = offsets_[j + 1];
    return {std::span(cells_).subspan(b, e - b), std::span(weights_).subspan(b, e - b)};
}

double row_dot(SparseRowView row, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) s += row.weights[k] * x[row.cells[k]];
    return s;
}

RaySystem assemble(const Scene& scene, const RaySet& rays, std::span<const double> f_true) {
    if (f_true.size() != static_cast<std::size_t>(scene.grid.cell_count())) {
        throw Error(Errc::DimensionMismatch, "phantom size does not match the grid");
    }
    RaySystem system(scene.grid.cell_count());
    for (std::size_t j = 0; j < rays.size(); ++j) {
        auto row = try_ray_row(scene, rays.rays[j]);
        if (!row) {
            ++system.dropped;
            continue;
        }
        system.add_row(*row, row_dot(row->view(), f_true), j);
    }
    if (system.rows() == 0) throw Error(Errc::AllRaysEmpty, "no ray crosses the region");
    return system;
}

RaySystem assemble_supersampled(const Scene& scene, const RaySet& rays, const std::function<double(Vec2)>& field,
                                int factor) {
    if (factor < 1) throw Error(Errc::InvalidArgument, "supersampling factor must be at least 1");
    const Grid fine{scene.grid.origin, scene.grid.cells_per_row * factor, scene.grid.cell_size / factor};
    const CellMask fine_mask =
        classify_cells(fine, scene.boundary, scene.obstacle ? &*scene.obstacle : nullptr);
    RaySystem system(scene.grid.cell_count());
    std::vector<Entry> entries;
    for (std::size_t j = 0; j < rays.size(); ++j) {
        auto row = try_ray_row(scene, rays.rays[j]);
        if (!row) {
            ++system.dropped;
            continue;
        }
        entries.clear();
        for (const Segment& leg : rays.rays[j].legs()) traverse_into(fine, leg.a, leg.b, entries);
        double t = 0.0;
        for (const Entry& e : entries) {
            if (fine_mask[e.cell] == CellClass::Region) t += e.weight * field(fine.cell_center(e.cell));
        }
        system.add_row(*row, t, j);
    }
    if (system.rows() == 0) throw Error(Errc::AllRaysEmpty, "no ray crosses the region");
    return system;
}

std::vector<double> forward_project(const RaySystem& system, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(system.n_cols())) {
        throw Error(Errc::DimensionMismatch, "vector length does not match the system's column count");
    }
    std::vector<double> out(system.rows());
    for (std::size_t j = 0; j < system.rows(); ++j) out[j] = row_dot(system.row(j), x);
    return out;
}

void write_system(std::ostream& out, const RaySystem& system) {
    out << system.rows() << ' ' << system.n_cols() << '\n';
    for (std::size_t j = 0; j < system.rows(); ++j) {
        const SparseRowView row = system.row(j);
        out << row.size();
        for (std::size_t k = 0; k < row.size(); ++k) {
            out << ' ' << row.cells[k] << ':';
            append_real(out, row.weights[k]);
        }
        out << " | ";
        append_real(out, system.time(j));
        out << '\n';
    }
    if (!out) throw Error(Errc::IoFailure, "failed writing system");
}

RaySystem read_system(std::istream& in) {
    std::size_t r = 0;
    std::int32_t n_cols = 0;
    if (!(in >> r >> n_cols) || n_cols <= 0) throw Error(Errc::ParseError, "bad system header");
    std::string line;
    std::getline(in, line);
    RaySystem system(n_cols);
    for (std::size_t j = 0; j < r; ++j) {
        if (!std::getline(in, line)) throw Error(Errc::ParseError, "system truncated at row " + std::to_string(j));
        const std::size_t lineno = j + 2;
        std::istringstream ss(line);
        std::size_t k = 0;
        if (!(ss >> k)) throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": missing entry count");
        SparseRow row;
        std::string tok;
        for (std::size_t e = 0; e < k; ++e) {
            if (!(ss >> tok)) throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": missing entry");
            const auto colon = tok.find(':');
            if (colon == std::string::npos) {
                throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": entry without ':'");
            }
            std::int32_t cell = 0;
            const auto res = std::from_chars(tok.data(), tok.data() + colon, cell);
            if (res.ec != std::errc() || res.ptr != tok.data() + colon) {
                throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": bad cell index");
            }
            row.cells.push_back(cell);
            row.weights.push_back(parse_real(std::string_view(tok).substr(colon + 1), lineno));
        }
        if (!(ss >> tok) || tok != "|") throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": missing '|'");
        if (!(ss >> tok)) throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": missing time");
        system.add_row(row, parse_real(tok, lineno), j);
    }
    return system;
}

}  // namespace brt
