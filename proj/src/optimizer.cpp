#include "chaosfit/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "chaosfit/error.hpp"

namespace chaosfit {

namespace {

double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }
bool finite(const Vec2& a) { return std::isfinite(a[0]) && std::isfinite(a[1]); }

}  // namespace

void OptimizerConfig::validate() const {
    box.validate();
    if (max_iters == 0) throw ValidationError("max_iters must be >= 1");
    if (!(tol_grad >= 0.0) || !(tol_step >= 0.0)) throw ValidationError("tolerances must be >= 0");
    if (!(gamma_min > 0.0) || !(gamma_max >= gamma_min)) {
        throw ValidationError("step bounds must satisfy 0 < gamma_min <= gamma_max");
    }
    if (!(gamma0 > 0.0)) throw ValidationError("gamma0 must be > 0");
    if (!(clip > 0.0)) throw ValidationError("clip threshold must be > 0");
    if (!active[0] && !active[1]) throw ValidationError("at least one parameter must be active");
}

BbStep bb_step(const OptimizerState& state, double gamma_min, double gamma_max) {
    const Vec2 s{state.theta_curr.drift - state.theta_prev.drift,
                 state.theta_curr.diffusion - state.theta_prev.diffusion};
    const Vec2 y{state.grad_curr[0] - state.grad_prev[0], state.grad_curr[1] - state.grad_prev[1]};
    const double yy = dot(y, y);
    if (yy == 0.0) return {gamma_min, true};
    const double gamma = std::abs(dot(s, y)) / yy;
    if (!std::isfinite(gamma)) return {gamma_min, true};
    return {std::clamp(gamma, gamma_min, gamma_max), false};
}

Vec2 clip_gradient(const Vec2& g, double threshold) {
    const double n = norm(g);
    if (n <= threshold || n == 0.0) return g;
    const double scale = threshold / n;
    return {g[0] * scale, g[1] * scale};
}

std::string to_string(OptimizerStatus status) {
    switch (status) {
        case OptimizerStatus::Converged: return "converged";
        case OptimizerStatus::MaxIters: return "max_iters";
        case OptimizerStatus::Diverged: return "diverged";
    }
    return "?";
}

OptimizerTrace run(const GradientOracle& oracle, const Theta& theta0, const OptimizerConfig& config) {
    config.validate();
    OptimizerTrace trace;

    auto masked = [&](Vec2 g) {
        for (int j = 0; j < 2; ++j) {
            if (!config.active[j]) g[j] = 0.0;
        }
        return g;
    };
    // Returns false when the oracle fails or produces non-finite values.
    auto evaluate = [&](const Theta& th, LossAndGradient& out) {
        try {
            out = oracle(th);
        } catch (const NumericalError& e) {
            trace.message = e.what();
            return false;
        }
        out.grad = masked(out.grad);
        if (!std::isfinite(out.loss) || !finite(out.grad)) {
            trace.message = "non-finite loss or gradient";
            return false;
        }
        return true;
    };

    OptimizerState state;
    state.theta_curr = config.box.project(theta0);
    LossAndGradient cur;
    if (!evaluate(state.theta_curr, cur)) {
        trace.status = OptimizerStatus::Diverged;
        trace.final_theta = state.theta_curr;
        trace.final_loss = cur.loss;
        return trace;
    }
    state.grad_curr = cur.grad;
    trace.records.push_back({0, state.theta_curr, cur.loss, norm(cur.grad), 0.0, false});

    trace.status = OptimizerStatus::MaxIters;
    for (std::size_t it = 1; it <= config.max_iters; ++it) {
        if (norm(state.grad_curr) <= config.tol_grad) {
            trace.status = OptimizerStatus::Converged;
            break;
        }
        BbStep step{config.gamma0, false};
        if (it > 1) step = bb_step(state, config.gamma_min, config.gamma_max);

        const Vec2 d = clip_gradient(state.grad_curr, config.clip);
        const Theta next = config.box.project(
            {state.theta_curr.drift - step.gamma * d[0], state.theta_curr.diffusion - step.gamma * d[1]});

        LossAndGradient nxt;
        if (!evaluate(next, nxt)) {
            trace.status = OptimizerStatus::Diverged;
            break;
        }
        const double step_norm = norm({next.drift - state.theta_curr.drift, next.diffusion - state.theta_curr.diffusion});
        if (it > 1 && nxt.loss > cur.loss) ++trace.loss_increases;

        state.theta_prev = state.theta_curr;
        state.grad_prev = state.grad_curr;
        state.theta_curr = next;
        state.grad_curr = nxt.grad;
        state.gamma = step.gamma;
        state.iter = it;
        cur = nxt;
        trace.records.push_back({it, next, nxt.loss, norm(nxt.grad), step.gamma, step.degenerate});

        if (step_norm <= config.tol_step || norm(nxt.grad) <= config.tol_grad) {
            trace.status = OptimizerStatus::Converged;
            break;
        }
    }
    trace.final_theta = state.theta_curr;
    trace.final_loss = cur.loss;
    return trace;
}

OptimizerTrace run(const Objective& objective, const Theta& theta0, const OptimizerConfig& config) {
    return run(
        [&objective](const Theta& th) {
            const auto ev = objective.evaluate_with_gradient(th);
            return LossAndGradient{ev.loss.total, ev.grad};
        },
        theta0, config);
}

}  // namespace chaosfit
