#include "brt/rays.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "brt/projection.hpp"
#include "brt/random.hpp"

namespace brt {

namespace {

std::vector<Vec2> ring(const CircleBoundary& boundary, int n) {
    std::vector<Vec2> pts;
    pts.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double a = 2.0 * std::numbers::pi * k / n;
        pts.push_back(boundary.center + boundary.radius * Vec2{std::cos(a), std::sin(a)});
    }
    return pts;
}

// Edge whose closed segment lies within eps_on of p, with corner rejection.
std::optional<std::size_t> boundary_edge(const Obstacle& obstacle, Vec2 p, double eps_on, Errc& why) {
    const double eps_corner = 1e-9 * obstacle.perimeter();
    std::optional<std::size_t> best;
    double best_dist = eps_on;
    for (std::size_t e = 0; e < obstacle.edge_count(); ++e) {
        const Vec2 a = obstacle.edge_start(e);
        if (distance(p, a) < eps_corner) {
            why = Errc::CornerPoint;
            return std::nullopt;
        }
        const Vec2 ab = obstacle.edge_end(e) - a;
        const double t = std::clamp(dot(p - a, ab) / dot(ab, ab), 0.0, 1.0);
        const double dist = distance(p, a + t * ab);
        if (dist <= best_dist) {
            best_dist = dist;
            best = e;
        }
    }
    if (!best) why = Errc::NotOnBoundary;
    return best;
}

std::optional<RayPath> broken_ray_impl(Vec2 tx, Vec2 q, const Obstacle& obstacle, const CircleBoundary& boundary,
                                       double eps_on, Errc& why) {
    const auto edge = boundary_edge(obstacle, q, eps_on, why);
    if (!edge) return std::nullopt;
    const Vec2 normal = obstacle.edge_normal(*edge);
    if (distance(tx, q) == 0.0) {
        why = Errc::DegenerateRay;
        return std::nullopt;
    }
    const Vec2 dir = normalized(q - tx);
    const double dn = dot(dir, normal);
    if (std::abs(dn) < kGrazeEpsilon) {
        why = Errc::GrazingIncidence;
        return std::nullopt;
    }
    if (dn > 0.0) {
        why = Errc::BackFacing;
        return std::nullopt;
    }
    if (segment_blocked(tx, q, obstacle, eps_on)) {
        why = Errc::NotVisible;
        return std::nullopt;
    }
    const Vec2 out = normalized(dir - 2.0 * dn * normal);
    const Vec2 rx = circle_exit(q, out, boundary);
    if (segment_blocked(q, rx, obstacle, eps_on)) {
        why = Errc::NotVisible;
        return std::nullopt;
    }
    return RayPath{RayKind::Broken, tx, q, rx};
}

std::size_t nearest_station(const std::vector<Vec2>& stations, Vec2 center, Vec2 p) {
    const double target = std::atan2(p.y - center.y, p.x - center.x);
    std::size_t best = 0;
    double best_gap = 10.0;
    for (std::size_t k = 0; k < stations.size(); ++k) {
        const double a = std::atan2(stations[k].y - center.y, stations[k].x - center.x);
        double gap = std::abs(std::remainder(a - target, 2.0 * std::numbers::pi));
        if (gap < best_gap) {
            best_gap = gap;
            best = k;
        }
    }
    return best;
}

std::vector<Vec2> merged_stations(const StationLayout& layout) {
    const double tol = 1e-9 * layout.boundary.radius;
    std::vector<Vec2> merged = layout.transmitters;
    for (Vec2 r : layout.receivers) {
        const bool present = std::any_of(merged.begin(), merged.end(), [&](Vec2 p) { return distance(p, r) <= tol; });
        if (!present) merged.push_back(r);
    }
    return merged;
}

bool chord_admissible(Vec2 a, Vec2 b, const Obstacle* obstacle, const RayRules& rules, double coincide_tol,
                      double eps_on) {
    const double len = distance(a, b);
    if (len <= coincide_tol || len < rules.min_chord_length) return false;
    return obstacle == nullptr || !segment_blocked(a, b, *obstacle, eps_on);
}

}  // namespace

StationLayout place_stations(const CircleBoundary& boundary, int n_tx, int n_rx) {
    if (n_tx < 2 || n_rx < 2) {
        throw Error(Errc::InvalidArgument, "at least two transmitters and two receivers are required");
    }
    return StationLayout{boundary, ring(boundary, n_tx), ring(boundary, n_rx)};
}

std::vector<Segment> RayPath::legs() const {
    if (kind == RayKind::Broken) return {{tx, *reflection}, {*reflection, rx}};
    return {{tx, rx}};
}

double RayPath::length() const {
    double len = 0.0;
    for (const Segment& s : legs()) len += distance(s.a, s.b);
    return len;
}

std::size_t RaySet::count(RayKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(rays.begin(), rays.end(), [kind](const RayPath& r) { return r.kind == kind; }));
}

RayPath make_unbroken_ray(Vec2 tx, Vec2 rx, const Obstacle& obstacle, double eps_on) {
    if (tx == rx) throw Error(Errc::DegenerateRay, "transmitter and receiver coincide");
    if (segment_blocked(tx, rx, obstacle, eps_on)) {
        throw Error(Errc::Blocked, "chord intersects the obstacle");
    }
    return RayPath{RayKind::Unbroken, tx, std::nullopt, rx};
}

RayPath make_unbroken_ray(const Scene& scene, Vec2 tx, Vec2 rx) {
    if (scene.obstacle) return make_unbroken_ray(tx, rx, *scene.obstacle, scene.eps_on());
    if (tx == rx) throw Error(Errc::DegenerateRay, "transmitter and receiver coincide");
    return RayPath{RayKind::Unbroken, tx, std::nullopt, rx};
}

RayPath make_broken_ray(Vec2 tx, Vec2 q, const Obstacle& obstacle, const CircleBoundary& boundary, double eps_on) {
    Errc why = Errc::InvalidArgument;
    auto ray = broken_ray_impl(tx, q, obstacle, boundary, eps_on, why);
    if (!ray) throw Error(why, "cannot form a broken ray through this boundary point");
    return *ray;
}

RayPath make_broken_ray(const Scene& scene, Vec2 tx, Vec2 q) {
    if (!scene.obstacle) throw Error(Errc::InvalidArgument, "scene has no obstacle to reflect from");
    return make_broken_ray(tx, q, *scene.obstacle, scene.boundary, scene.eps_on());
}

std::optional<RayPath> try_broken_ray(const Scene& scene, Vec2 tx, Vec2 q, Errc& why) {
    if (!scene.obstacle) {
        why = Errc::InvalidArgument;
        return std::nullopt;
    }
    return broken_ray_impl(tx, q, *scene.obstacle, scene.boundary, scene.eps_on(), why);
}

RaySet enumerate_unbroken(const StationLayout& layout, const Obstacle* obstacle, const RayRules& rules,
                          double eps_on) {
    const double tol = 1e-9 * layout.boundary.radius;
    RaySet set;
    if (rules.pairing == PairConvention::Ordered) {
        for (Vec2 tx : layout.transmitters) {
            for (Vec2 rx : layout.receivers) {
                if (chord_admissible(tx, rx, obstacle, rules, tol, eps_on)) {
                    set.rays.push_back({RayKind::Unbroken, tx, std::nullopt, rx});
                }
            }
        }
    } else {
        const std::vector<Vec2> stations = merged_stations(layout);
        for (std::size_t i = 0; i < stations.size(); ++i) {
            for (std::size_t j = i + 1; j < stations.size(); ++j) {
                if (chord_admissible(stations[i], stations[j], obstacle, rules, tol, eps_on)) {
                    set.rays.push_back({RayKind::Unbroken, stations[i], std::nullopt, stations[j]});
                }
            }
        }
    }
    return set;
}

RaySet enumerate_unbroken(const Scene& scene, const StationLayout& layout, const RayRules& rules) {
    return enumerate_unbroken(layout, scene.obstacle ? &*scene.obstacle : nullptr, rules, scene.eps_on());
}

RaySet sample_ray_set(const Scene& scene, const StationLayout& layout, std::size_t n_total, double fraction_unbroken,
                      std::uint64_t seed, const RayRules& rules) {
    if (n_total == 0) throw Error(Errc::InvalidArgument, "n_total must be at least 1");
    if (!(fraction_unbroken >= 0.0 && fraction_unbroken <= 1.0)) {
        throw Error(Errc::InvalidArgument, "fraction_unbroken must lie in [0, 1]");
    }
    const auto n_unbroken = static_cast<std::size_t>(std::llround(static_cast<double>(n_total) * fraction_unbroken));
    const std::size_t n_broken = n_total - n_unbroken;
    if (n_broken > 0 && !scene.obstacle) {
        throw Error(Errc::InvalidArgument, "broken rays requested but the scene has no obstacle");
    }

    const Rng root(seed);
    Rng order_rng = root.split(1);
    Rng unbroken_rng = root.split(2);
    Rng broken_rng = root.split(3);

    std::vector<RayPath> unbroken;
    if (n_unbroken > 0) {
        RaySet candidates = enumerate_unbroken(scene, layout, rules);
        const std::size_t m = candidates.size();
        if (n_unbroken > m) {
            throw Error(Errc::ExhaustedCandidates, "requested " + std::to_string(n_unbroken) +
                                                       " unbroken rays but only " + std::to_string(m) +
                                                       " admissible pairs exist");
        }
        std::vector<std::size_t> idx(m);
        for (std::size_t k = 0; k < m; ++k) idx[k] = k;
        unbroken.reserve(n_unbroken);
        for (std::size_t k = 0; k < n_unbroken; ++k) {
            const std::size_t j = k + static_cast<std::size_t>(unbroken_rng.uniform_index(m - k));
            std::swap(idx[k], idx[j]);
            unbroken.push_back(candidates.rays[idx[k]]);
        }
    }

    std::vector<RayPath> broken;
    if (n_broken > 0) {
        const Obstacle& obstacle = *scene.obstacle;
        const double perimeter = obstacle.perimeter();
        const std::size_t budget = rules.attempts_per_ray * n_broken + 1000;
        std::set<std::pair<std::size_t, std::int64_t>> seen;
        broken.reserve(n_broken);
        std::size_t attempts = 0;
        while (broken.size() < n_broken) {
            if (attempts++ >= budget) {
                throw Error(Errc::ExhaustedCandidates, "accepted only " + std::to_string(broken.size()) + " of " +
                                                           std::to_string(n_broken) + " broken rays");
            }
            const auto t = static_cast<std::size_t>(broken_rng.uniform_index(layout.transmitters.size()));
            const double u = broken_rng.uniform01();
            const std::pair<std::size_t, std::int64_t> key{t, std::llround(u * 1e12)};
            if (seen.contains(key)) continue;
            Errc why = Errc::InvalidArgument;
            auto ray = try_broken_ray(scene, layout.transmitters[t], obstacle.point_at(u * perimeter), why);
            if (!ray) continue;
            if (rules.receiver == ReceiverModel::SnapToStation) {
                ray->rx = layout.receivers[nearest_station(layout.receivers, layout.boundary.center, ray->rx)];
                if (segment_blocked(*ray->reflection, ray->rx, obstacle, scene.eps_on())) continue;
            }
            seen.insert(key);
            broken.push_back(*ray);
        }
    }

    std::vector<RayKind> schedule(n_total, RayKind::Broken);
    std::fill_n(schedule.begin(), n_unbroken, RayKind::Unbroken);
    for (std::size_t k = n_total - 1; k > 0; --k) {
        const auto j = static_cast<std::size_t>(order_rng.uniform_index(k + 1));
        std::swap(schedule[k], schedule[j]);
    }

    RaySet set;
    set.seed = seed;
    set.fraction_unbroken = fraction_unbroken;
    set.rays.reserve(n_total);
    std::size_t next_u = 0;
    std::size_t next_b = 0;
    for (RayKind kind : schedule) {
        set.rays.push_back(kind == RayKind::Unbroken ? unbroken[next_u++] : broken[next_b++]);
    }
    return set;
}

std::vector<std::int32_t> discrete_signature(const Scene& scene, const RayPath& ray) {
    auto row = try_ray_row(scene, ray);
    if (!row) return {};
    return row->cells;
}

std::int64_t class_count_bound(std::int64_t v1, std::int64_t v2) { return v1 * v1 + v1 * v2; }

BoundaryCellCounts boundary_cell_counts(const Scene& scene) {
    const Grid& g = scene.grid;
    const int n = g.cells_per_row;
    const double r = scene.boundary.radius;
    BoundaryCellCounts counts;
    for (std::int32_t c = 0; c < g.cell_count(); ++c) {
        if (!scene.is_region(c)) continue;
        const Vec2 lo = g.origin + Vec2{g.column(c) * g.cell_size, g.row(c) * g.cell_size};
        const Vec2 hi = lo + Vec2{g.cell_size, g.cell_size};
        const Vec2 m = scene.boundary.center;
        const Vec2 nearest{std::clamp(m.x, lo.x, hi.x), std::clamp(m.y, lo.y, hi.y)};
        const Vec2 farthest{std::abs(lo.x - m.x) > std::abs(hi.x - m.x) ? lo.x : hi.x,
                            std::abs(lo.y - m.y) > std::abs(hi.y - m.y) ? lo.y : hi.y};
        if (distance(nearest, m) <= r && distance(farthest, m) >= r) ++counts.circle;

        bool touches_obstacle = false;
        for (int dj = -1; dj <= 1 && !touches_obstacle; ++dj) {
            for (int di = -1; di <= 1; ++di) {
                const int i = g.column(c) + di;
                const int j = g.row(c) + dj;
                if (i < 0 || j < 0 || i >= n || j >= n) continue;
                if (scene.mask[g.index(i, j)] == CellClass::Obstacle) {
                    touches_obstacle = true;
                    break;
                }
            }
        }
        if (touches_obstacle) ++counts.obstacle;
    }
    return counts;
}

void write_rays(std::ostream& out, const RaySet& rays) {
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, " %.17g", v);
        out << buf;
    };
    for (const RayPath& r : rays.rays) {
        out << (r.kind == RayKind::Broken ? 'B' : 'U');
        put(r.tx.x);
        put(r.tx.y);
        if (r.kind == RayKind::Broken) {
            put(r.reflection->x);
            put(r.reflection->y);
        }
        put(r.rx.x);
        put(r.rx.y);
        out << '\n';
    }
    if (!out) throw Error(Errc::IoFailure, "failed writing ray set");
}

std::vector<RayPath> read_rays(std::istream& in) {
    std::vector<RayPath> rays;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        const bool broken = tag == "B";
        if (!broken && tag != "U") {
            throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": unknown ray tag '" + tag + "'");
        }
        std::vector<double> v;
        std::string tok;
        while (ss >> tok) {
            double x = 0.0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
            if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
                throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": bad number '" + tok + "'");
            }
            v.push_back(x);
        }
        if (v.size() != (broken ? 6u : 4u)) {
            throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": wrong field count");
        }
        if (broken) {
            rays.push_back({RayKind::Broken, {v[0], v[1]}, Vec2{v[2], v[3]}, {v[4], v[5]}});
        } else {
            rays.push_back({RayKind::Unbroken, {v[0], v[1]}, std::nullopt, {v[2], v[3]}});
        }
    }
    return rays;
}

}  // namespace brt
