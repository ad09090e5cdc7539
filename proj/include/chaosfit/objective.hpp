#pragma once

#include <functional>
#include <string>

#include "chaosfit/models.hpp"
#include "chaosfit/propagator.hpp"
#include "chaosfit/sim_stats.hpp"

namespace chaosfit {

/// Full: mean misfit plus the variance-vs-QV penalty. MeanOnly: drift-only
/// loss used for the OU process.
enum class LossMode { Full, MeanOnly };

std::string to_string(LossMode mode);
LossMode parse_loss_mode(const std::string& name);

struct LossReport {
    double fidelity = 0.0;
    double qv_penalty = 0.0;
    double total = 0.0;
};

/// Observation-side series the loss compares against.
struct LossTargets {
    TimeGrid grid;
    Series mean;       // (1/N) sum_k x^k(t)
    Series qv_target;  // (1/N) sum_k <x^k,x^k>_t / <x^k>^2_t

    static LossTargets from(const TrajectorySet& data, const QvStats& qv);
};

LossReport loss(const ChaosCoefficients& coeffs, const LossTargets& targets, LossMode mode);
LossReport loss(const ChaosCoefficients& coeffs, const TrajectorySet& data, const QvStats& qv, LossMode mode);

/// Forward sensitivities dX_m/dtheta_j at theta. `coeffs` must come from the
/// same (model, theta); only its grid, basis and order are reused.
Sensitivities sensitivities(const SdeModel& model, const Theta& theta, const ChaosCoefficients& coeffs);

Vec2 gradient(const ChaosCoefficients& coeffs, const Sensitivities& sens, const LossTargets& targets, LossMode mode);
Vec2 gradient(const SdeModel& model, const Theta& theta, const ChaosCoefficients& coeffs, const Sensitivities& sens,
              const TrajectorySet& data, const QvStats& qv, LossMode mode);

/// Central differences per coordinate. Throws ValidationError if theta +- h
/// leaves the box or h <= 0.
Vec2 finite_diff_gradient(const std::function<double(const Theta&)>& evaluator, const Theta& theta, double h,
                          const ParamBox& box);

/// Loss and gradient as functions of theta for a fixed model and data set.
class Objective {
public:
    struct Evaluation {
        LossReport loss;
        Vec2 grad{0.0, 0.0};
    };

    Objective(SdeModel model, TimeGrid grid, unsigned basis_count, unsigned order, LossTargets targets,
              LossMode mode);

    LossReport evaluate(const Theta& theta) const;
    Evaluation evaluate_with_gradient(const Theta& theta) const;

    const SdeModel& model() const noexcept { return model_; }
    LossMode mode() const noexcept { return mode_; }
    const LossTargets& targets() const noexcept { return targets_; }

    /// Applied to the sensitivities before the gradient is assembled. Used
    /// as a negative control for the gradient check.
    void set_sensitivity_hook(std::function<void(Sensitivities&)> hook) { hook_ = std::move(hook); }

private:
    SdeModel model_;
    TimeGrid grid_;
    BasisSet basis_;
    unsigned order_;
    LossTargets targets_;
    LossMode mode_;
    std::function<void(Sensitivities&)> hook_;
};

}  // namespace chaosfit
