#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "chaosfit/models.hpp"
#include "chaosfit/objective.hpp"

namespace chaosfit {

struct OptimizerConfig {
    std::size_t max_iters = 200;
    double tol_grad = 1e-6;
    double tol_step = 1e-8;
    double gamma0 = 1.0;
    double gamma_min = 1e-6;
    double gamma_max = 1e3;
    double clip = 100.0;
    ParamBox box;
    /// Coordinates that move; a frozen coordinate keeps its start value and
    /// its gradient component is ignored.
    std::array<bool, 2> active{true, true};

    void validate() const;
};

struct OptimizerState {
    Theta theta_prev;
    Theta theta_curr;
    Vec2 grad_prev{0.0, 0.0};
    Vec2 grad_curr{0.0, 0.0};
    double gamma = 0.0;
    std::size_t iter = 0;
};

struct BbStep {
    double gamma = 0.0;
    bool degenerate = false;  // gradient difference was zero
};

/// gamma_k = |s^T y| / ||y||^2 clamped to [gamma_min, gamma_max], with
/// s = theta_k - theta_{k-1} and y = grad_k - grad_{k-1}. y = 0 falls back to
/// gamma_min and sets the degenerate flag.
BbStep bb_step(const OptimizerState& state, double gamma_min, double gamma_max);

/// Rescales g to norm <= threshold; direction is preserved.
Vec2 clip_gradient(const Vec2& g, double threshold);

enum class OptimizerStatus { Converged, MaxIters, Diverged };
std::string to_string(OptimizerStatus status);

struct IterationRecord {
    std::size_t iter = 0;
    Theta theta;
    double loss = 0.0;
    double grad_norm = 0.0;
    double gamma = 0.0;  // step size that produced this iterate, 0 for the start
    bool degenerate_step = false;
};

struct OptimizerTrace {
    std::vector<IterationRecord> records;
    OptimizerStatus status = OptimizerStatus::MaxIters;
    Theta final_theta;
    double final_loss = 0.0;
    /// Loss increases observed after the first Barzilai-Borwein step.
    std::size_t loss_increases = 0;
    std::string message;

    std::size_t iterations() const noexcept { return records.empty() ? 0 : records.back().iter; }
};

struct LossAndGradient {
    double loss = 0.0;
    Vec2 grad{0.0, 0.0};
};

using GradientOracle = std::function<LossAndGradient(const Theta&)>;

/**
 * Projected gradient descent with Barzilai-Borwein steps:
 * theta_{k+1} = P_box(theta_k - gamma_k clip(grad u(theta_k))).
 * The first step uses gamma0. Stops when the gradient norm drops to tol_grad,
 * the step norm to tol_step, or after max_iters steps. A non-finite loss or
 * gradient, or a NumericalError from the oracle, ends the run as Diverged at
 * the last good iterate.
 */
OptimizerTrace run(const GradientOracle& oracle, const Theta& theta0, const OptimizerConfig& config);
OptimizerTrace run(const Objective& objective, const Theta& theta0, const OptimizerConfig& config);

}  // namespace chaosfit
