#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "chaosfit/optimizer.hpp"
#include "chaosfit/propagator.hpp"
#include "chaosfit/sim_stats.hpp"

namespace chaosfit {

/// Header `t,x1,...,xN`, one row per grid point, %.17g numbers.
void write_trajectories_csv(const TrajectorySet& set, const std::filesystem::path& path);

/**
 * Reads a trajectory CSV. The grid must start at 0 and be uniform within
 * 1e-9 relative spacing; with `expected` the horizon and step count must
 * match too. Ragged rows, non-numeric cells and non-finite values are
 * reported with their 1-based (row, column) location; row 1 is the header.
 */
TrajectorySet ingest_csv(const std::filesystem::path& path, const std::optional<TimeGrid>& expected = std::nullopt);

/// Mean of the cross-path mean over the final 10% of time points.
double plateau_capacity(const TrajectorySet& set);
/// Every value divided by `capacity`.
TrajectorySet normalize_by_capacity(const TrajectorySet& set, double capacity);

/// One column per mode, header `t,<canonical index>...`.
void write_coefficients_csv(const ChaosCoefficients& coeffs, const std::filesystem::path& path);
/// Header `t,mean,variance`.
void write_moments_csv(const ChaosCoefficients& coeffs, const std::filesystem::path& path);
/// Header `iter,theta1,theta2,loss,grad_norm,gamma`.
void write_trace_csv(const OptimizerTrace& trace, const std::filesystem::path& path);

/// Shortest-safe text for a double (%.17g).
std::string format_double(double v);

}  // namespace chaosfit
