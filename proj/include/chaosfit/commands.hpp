#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "chaosfit/config.hpp"
#include "chaosfit/optimizer.hpp"
#include "chaosfit/sim_stats.hpp"

namespace chaosfit {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

struct CommandOptions {
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
    std::filesystem::path out = ".";
    std::vector<std::string> overrides;  // key=value
    std::optional<std::filesystem::path> data;
};

/// Config file, then --set overrides, then --seed / --data.
RunConfig resolve_config(const CommandOptions& opts);

struct StartResult {
    Theta start;
    OptimizerTrace trace;
};

struct EstimationResult {
    double x0 = 0.0;
    double sigma_tilde = 0.0;
    LossMode mode = LossMode::Full;
    std::vector<StartResult> starts;
};

/**
 * Diffusion pre-estimate followed by one projected BB descent per entry of
 * cfg.theta0. The initial state is the data mean at t = 0. With the
 * mean-only loss only theta1 moves and theta2 stays at its start.
 */
EstimationResult estimate(const RunConfig& cfg, const TrajectorySet& data);

struct GradcheckPoint {
    Theta theta;
    Vec2 analytic{0.0, 0.0};
    Vec2 finite_diff{0.0, 0.0};
    double rel_error = 0.0;
};

struct GradcheckReport {
    std::vector<GradcheckPoint> points;
    double max_rel_error = 0.0;
};

/// max_j |g_j - fd_j| / max(|g|_inf, |fd|_inf).
double relative_gradient_error(const Vec2& analytic, const Vec2& fd);

/// Analytic gradient vs central differences at random points of the
/// configured ranges, on data simulated at cfg.theta_true.
GradcheckReport gradcheck(const RunConfig& cfg);

int cmd_simulate(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_estimate(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_gradcheck(const RunConfig& cfg, const std::filesystem::path& out);
int cmd_propagate(const RunConfig& cfg, const std::filesystem::path& out);

/// Parses argv and dispatches; maps ValidationError to 1 and NumericalError to 2.
int run_cli(int argc, const char* const* argv);

}  // namespace chaosfit
