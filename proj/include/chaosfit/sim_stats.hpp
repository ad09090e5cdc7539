#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chaosfit/models.hpp"
#include "chaosfit/time_grid.hpp"

namespace chaosfit {

/// N paths sharing one uniform grid.
struct TrajectorySet {
    TimeGrid grid;
    std::vector<Series> paths;
    std::optional<std::uint64_t> seed;  // absent for ingested data

    std::size_t path_count() const noexcept { return paths.size(); }
    /// Throws ValidationError on shape mismatch or non-finite values.
    void validate() const;
};

struct SimulationReport {
    TrajectorySet set;
    std::size_t rejected = 0;  // logistic paths resampled after leaving (0, 1.5)
};

/**
 * Euler-Maruyama ensemble. Path k draws from its own substream keyed by
 * seed ^ k, so output is reproducible for fixed (seed, N, grid). Logistic
 * paths leaving (0, 1.5) are redrawn from a fresh substream; more than 1%
 * redraws raises NumericalError.
 */
SimulationReport euler_maruyama(const SdeModel& model, const Theta& theta, const TimeGrid& grid, std::size_t N,
                                std::uint64_t seed);

/// Cumulative sum of squared increments; starts at 0.
Series quadratic_variation(std::span<const double> path, const TimeGrid& grid);
/// Cumulative trapezoid approximation of the integral of x^2; starts at 0.
Series energy(std::span<const double> path, const TimeGrid& grid);

/// Pointwise mean across paths.
Series mean_trajectory(const TrajectorySet& set);

struct QvStats {
    std::vector<Series> qv;
    std::vector<Series> energy;
    /// qv / energy per path; defined as 0 at t = 0 where both vanish.
    std::vector<Series> ratio;
    /// (1/N) sum_k ratio_k(t): the diffusion target of the full loss.
    Series mean_ratio;
    double sigma_tilde = 0.0;
};

/**
 * Diffusion pre-estimate. Multiplicative noise: sqrt of the path-averaged
 * QV_T / energy_T. Additive noise: sqrt of the path-averaged QV_T / T.
 * Throws ValidationError on a zero-energy path.
 */
double sigma_tilde(const TrajectorySet& set, NoiseType noise);

QvStats compute_qv_stats(const TrajectorySet& set, NoiseType noise);

}  // namespace chaosfit
