#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brt/projection.hpp"

namespace brt {

struct SolveOptions {
    double radius_euclidean = 1e-9;
    double radius_max = 1e-9;
    int required_consecutive = 2;
    int max_sweeps = 500;
    double relaxation = 1.0;

    void validate() const;
};

struct SolveReport {
    std::vector<double> solution;
    std::size_t iterations = 0;  // row updates
    int sweeps = 0;
    bool converged = false;
    double final_residual_norm = 0.0;
};

/// x += relaxation * (t - w.x) / (w.w) * w, touching only the row's support.
/// Throws ZeroRow when w.w == 0.
void kaczmarz_step(SparseRowView row, double t, std::span<double> x, double relaxation = 1.0);

/// Cyclic Kaczmarz from x = 0, row h = i mod r at update i. Convergence is
/// checked at sweep ends: both the Euclidean and the max distance to the
/// previous sweep's iterate must stay below their radii for
/// `required_consecutive` sweeps in a row.
SolveReport solve(const RaySystem& system, const SolveOptions& opts);

struct ResidualNorms {
    double euclidean = 0.0;
    double max = 0.0;
};

/// Norms of W*x - T. Throws DimensionMismatch.
ResidualNorms residual_norms(const RaySystem& system, std::span<const double> x);

}  // namespace brt
