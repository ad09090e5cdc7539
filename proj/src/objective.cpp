#include "chaosfit/objective.hpp"

#include <algorithm>
#include <cmath>

#include "chaosfit/error.hpp"

namespace chaosfit {

std::string to_string(LossMode mode) { return mode == LossMode::Full ? "full" : "mean_only"; }

LossMode parse_loss_mode(const std::string& name) {
    if (name == "full") return LossMode::Full;
    if (name == "mean_only" || name == "mean-only") return LossMode::MeanOnly;
    throw ValidationError("unknown loss mode '" + name + "' (expected full or mean_only)");
}

LossTargets LossTargets::from(const TrajectorySet& data, const QvStats& qv) {
    if (qv.mean_ratio.size() != data.grid.size()) throw ValidationError("QV statistics do not match the data grid");
    return {data.grid, mean_trajectory(data), qv.mean_ratio};
}

namespace {

void check_grid(const ChaosCoefficients& coeffs, const LossTargets& targets) {
    if (!(coeffs.grid() == targets.grid)) throw ValidationError("coefficient grid and data grid differ");
    if (targets.mean.size() != targets.grid.size() || targets.qv_target.size() != targets.grid.size()) {
        throw ValidationError("loss targets do not match their grid");
    }
}

}  // namespace

LossReport loss(const ChaosCoefficients& coeffs, const LossTargets& targets, LossMode mode) {
    check_grid(coeffs, targets);
    const std::size_t n = targets.grid.size();
    const double dt = targets.grid.dt();
    const auto x0 = coeffs.series(0);

    Series integrand(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = x0[i] - targets.mean[i];
        integrand[i] = r * r;
    }
    LossReport rep;
    rep.fidelity = trapezoid(integrand, dt);
    if (mode == LossMode::Full) {
        const Series var = wce_variance(coeffs);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = var[i] - targets.qv_target[i];
            integrand[i] = r * r;
        }
        rep.qv_penalty = trapezoid(integrand, dt);
    }
    rep.total = rep.fidelity + rep.qv_penalty;
    return rep;
}

LossReport loss(const ChaosCoefficients& coeffs, const TrajectorySet& data, const QvStats& qv, LossMode mode) {
    return loss(coeffs, LossTargets::from(data, qv), mode);
}

Sensitivities sensitivities(const SdeModel& model, const Theta& theta, const ChaosCoefficients& coeffs) {
    auto res = propagate_system(model, theta, coeffs.grid(), coeffs.basis(), coeffs.order(), true);
    if (res.sens->point_count() != coeffs.grid().size() || res.sens->mode_count() != coeffs.mode_count()) {
        throw ValidationError("sensitivity grid does not match the coefficients");
    }
    return std::move(*res.sens);
}

Vec2 gradient(const ChaosCoefficients& coeffs, const Sensitivities& sens, const LossTargets& targets,
              LossMode mode) {
    check_grid(coeffs, targets);
    if (sens.point_count() != coeffs.grid().size() || sens.mode_count() != coeffs.mode_count()) {
        throw ValidationError("sensitivity grid does not match the coefficients");
    }
    const std::size_t n = targets.grid.size();
    const double dt = targets.grid.dt();
    const auto x0 = coeffs.series(0);
    const Series var = mode == LossMode::Full ? wce_variance(coeffs) : Series{};

    Vec2 g{0.0, 0.0};
    Series integrand(n);
    for (int j = 0; j < 2; ++j) {
        const auto s0 = sens.series(j, 0);
        for (std::size_t i = 0; i < n; ++i) integrand[i] = (x0[i] - targets.mean[i]) * s0[i];
        g[j] = 2.0 * trapezoid(integrand, dt);
        if (mode != LossMode::Full) continue;

        // d/dtheta of sum_{|m|>=1} X_m^2 is 2 sum X_m dX_m.
        std::fill(integrand.begin(), integrand.end(), 0.0);
        for (std::size_t k = 1; k < coeffs.mode_count(); ++k) {
            const auto xm = coeffs.series(k);
            const auto sm = sens.series(j, k);
            for (std::size_t i = 0; i < n; ++i) integrand[i] += xm[i] * sm[i];
        }
        for (std::size_t i = 0; i < n; ++i) integrand[i] *= var[i] - targets.qv_target[i];
        g[j] += 4.0 * trapezoid(integrand, dt);
    }
    return g;
}

Vec2 gradient(const SdeModel&, const Theta&, const ChaosCoefficients& coeffs, const Sensitivities& sens,
              const TrajectorySet& data, const QvStats& qv, LossMode mode) {
    return gradient(coeffs, sens, LossTargets::from(data, qv), mode);
}

Vec2 finite_diff_gradient(const std::function<double(const Theta&)>& evaluator, const Theta& theta, double h,
                          const ParamBox& box) {
    if (!(h > 0.0)) throw ValidationError("finite-difference step must be > 0");
    Vec2 g{0.0, 0.0};
    const Vec2 base = theta.as_vec();
    for (int j = 0; j < 2; ++j) {
        Vec2 up = base;
        Vec2 down = base;
        up[j] += h;
        down[j] -= h;
        const Theta tu = Theta::from_vec(up);
        const Theta td = Theta::from_vec(down);
        if (!box.contains(tu) || !box.contains(td)) {
            throw ValidationError("finite-difference stencil leaves the parameter box");
        }
        g[j] = (evaluator(tu) - evaluator(td)) / (2.0 * h);
    }
    return g;
}

Objective::Objective(SdeModel model, TimeGrid grid, unsigned basis_count, unsigned order, LossTargets targets,
                     LossMode mode)
    : model_(std::move(model)),
      grid_(grid),
      basis_(grid.horizon(), basis_count),
      order_(order),
      targets_(std::move(targets)),
      mode_(mode) {
    if (!(targets_.grid == grid_)) throw ValidationError("objective grid and data grid differ");
}

LossReport Objective::evaluate(const Theta& theta) const {
    return loss(propagate(model_, theta, grid_, basis_, order_), targets_, mode_);
}

Objective::Evaluation Objective::evaluate_with_gradient(const Theta& theta) const {
    auto res = propagate_system(model_, theta, grid_, basis_, order_, true);
    if (hook_) hook_(*res.sens);
    return {loss(res.coeffs, targets_, mode_), gradient(res.coeffs, *res.sens, targets_, mode_)};
}

}  // namespace chaosfit
