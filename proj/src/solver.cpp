#include "brt/solver.hpp"

#include <algorithm>
#include <cmath>

namespace brt {

void SolveOptions::validate() const {
    if (!(radius_euclidean > 0.0) || !(radius_max > 0.0)) {
        throw Error(Errc::InvalidArgument, "convergence radii must be positive");
    }
    if (required_consecutive < 2) throw Error(Errc::InvalidArgument, "required_consecutive must be at least 2");
    if (max_sweeps < 1) throw Error(Errc::InvalidArgument, "max_sweeps must be positive");
    if (!(relaxation > 0.0 && relaxation <= 2.0)) throw Error(Errc::InvalidArgument, "relaxation must be in (0, 2]");
}

namespace {

inline void project(SparseRowView row, double t, double norm2, std::span<double> x, double relaxation) {
    const double scale = relaxation * (t - row_dot(row, x)) / norm2;
    for (std::size_t k = 0; k < row.size(); ++k) x[row.cells[k]] += scale * row.weights[k];
}

}  // namespace

void kaczmarz_step(SparseRowView row, double t, std::span<double> x, double relaxation) {
    double n2 = 0.0;
    for (double w : row.weights) n2 += w * w;
    if (!(n2 > 0.0)) throw Error(Errc::ZeroRow, "Kaczmarz step on a zero row");
    project(row, t, n2, x, relaxation);
}

SolveReport solve(const RaySystem& system, const SolveOptions& opts) {
    opts.validate();
    const std::size_t r = system.rows();
    SolveReport report;
    report.solution.assign(static_cast<std::size_t>(system.n_cols()), 0.0);
    if (r == 0) throw Error(Errc::AllRaysEmpty, "system has no rows");

    std::span<double> x(report.solution);
    std::vector<double> previous = report.solution;
    int consecutive = 0;
    while (report.sweeps < opts.max_sweeps) {
        for (std::size_t h = 0; h < r; ++h) {
            project(system.row(h), system.time(h), system.row_norm2(h), x, opts.relaxation);
        }
        report.iterations += r;
        ++report.sweeps;

        double e2 = 0.0;
        double emax = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double diff = std::abs(x[i] - previous[i]);
            e2 += diff * diff;
            emax = std::max(emax, diff);
        }
        consecutive = (std::sqrt(e2) < opts.radius_euclidean && emax < opts.radius_max) ? consecutive + 1 : 0;
        if (consecutive >= opts.required_consecutive) {
            report.converged = true;
            break;
        }
        std::copy(x.begin(), x.end(), previous.begin());
    }
    report.final_residual_norm = residual_norms(system, report.solution).euclidean;
    return report;
}

ResidualNorms residual_norms(const RaySystem& system, std::span<const double> x) {
    const std::vector<double> wx = forward_project(system, x);
    ResidualNorms n;
    double s = 0.0;
    for (std::size_t j = 0; j < wx.size(); ++j) {
        const double d = std::abs(wx[j] - system.time(j));
        s += d * d;
        n.max = std::max(n.max, d);
    }
    n.euclidean = std::sqrt(s);
    return n;
}

}  // namespace brt
