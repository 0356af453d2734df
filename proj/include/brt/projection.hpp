#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "brt/geometry.hpp"
#include "brt/rays.hpp"

namespace brt {

struct SparseRowView {
    std::span<const std::int32_t> cells;
    std::span<const double> weights;

    std::size_t size() const { return cells.size(); }
    bool empty() const { return cells.empty(); }
};

/// One row of the weight matrix: strictly increasing cell indices, each with
/// the length of ray inside that cell.
struct SparseRow {
    std::vector<std::int32_t> cells;
    std::vector<double> weights;

    std::size_t size() const { return cells.size(); }
    bool empty() const { return cells.empty(); }
    SparseRowView view() const { return {cells, weights}; }
    double total_weight() const;
};

/// Exact per-cell intersection lengths of [a, b] with the grid (Siddon
/// parametric traversal). Corner touches below 1e-12*d are omitted.
SparseRow traverse(const Grid& grid, Vec2 a, Vec2 b);

/// Sum of leg traversals with non-Region cells removed; nullopt if nothing remains.
std::optional<SparseRow> try_ray_row(const Scene& scene, const RayPath& ray);
/// As try_ray_row; throws EmptyRow.
SparseRow ray_row(const Scene& scene, const RayPath& ray);

/// W and T in compressed sparse row form, plus the index of the ray behind each row.
class RaySystem {
  public:
    RaySystem() = default;
    explicit RaySystem(std::int32_t n_cols) : n_cols_(n_cols) {}

    void add_row(const SparseRow& row, double time, std::size_t source_ray);

    std::size_t rows() const { return times_.size(); }
    std::int32_t n_cols() const { return n_cols_; }
    SparseRowView row(std::size_t j) const;
    double time(std::size_t j) const { return times_[j]; }
    std::span<const double> times() const { return times_; }
    double row_norm2(std::size_t j) const { return norms2_[j]; }
    std::size_t source_ray(std::size_t j) const { return sources_[j]; }
    std::size_t nonzeros() const { return cells_.size(); }

    /// Rays dropped during assembly because their rows were empty.
    std::size_t dropped = 0;

  private:
    std::int32_t n_cols_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<std::int32_t> cells_;
    std::vector<double> weights_;
    std::vector<double> times_;
    std::vector<double> norms2_;
    std::vector<std::size_t> sources_;
};

/// Forward-projects f_true with the same weights used for reconstruction.
/// Throws AllRaysEmpty when every row is empty.
RaySystem assemble(const Scene& scene, const RaySet& rays, std::span<const double> f_true);

/// Rows as in assemble, but travel times integrate `field` on a grid refined
/// by `factor` in each direction, keeping only sub-cells whose centers are in
/// the region. Avoids generating data with the reconstruction model.
RaySystem assemble_supersampled(const Scene& scene, const RaySet& rays, const std::function<double(Vec2)>& field,
                                int factor);

double row_dot(SparseRowView row, std::span<const double> x);

/// W*x. Throws DimensionMismatch.
std::vector<double> forward_project(const RaySystem& system, std::span<const double> x);

/// Header `r n_cols`, then per row `k idx:w ... | t` with 17 significant digits.
void write_system(std::ostream& out, const RaySystem& system);
RaySystem read_system(std::istream& in);

}  // namespace brt
