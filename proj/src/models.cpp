#include "chaosfit/models.hpp"

#include <algorithm>
#include <cmath>

#include "chaosfit/error.hpp"

namespace chaosfit {

bool ParamBox::contains(const Theta& t) const noexcept {
    return t.drift >= drift_lo && t.drift <= drift_hi && t.diffusion >= diffusion_lo &&
           t.diffusion <= diffusion_hi;
}

Theta ParamBox::project(const Theta& t) const noexcept {
    return {std::clamp(t.drift, drift_lo, drift_hi), std::clamp(t.diffusion, diffusion_lo, diffusion_hi)};
}

void ParamBox::validate() const {
    auto ok = [](double lo, double hi) { return std::isfinite(lo) && std::isfinite(hi) && lo <= hi; };
    if (!ok(drift_lo, drift_hi) || !ok(diffusion_lo, diffusion_hi)) {
        throw ValidationError("parameter box bounds must be finite with lo <= hi");
    }
    if (diffusion_lo < 0.0) throw ValidationError("diffusion parameter box must be non-negative");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::OU: return "ou";
        case ModelKind::GBM: return "gbm";
        case ModelKind::Logistic: return "logistic";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    std::string lower = name;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "ou") return ModelKind::OU;
    if (lower == "gbm") return ModelKind::GBM;
    if (lower == "logistic") return ModelKind::Logistic;
    throw ValidationError("unknown model kind '" + name + "' (expected ou, gbm or logistic)");
}

ParamMap ParamMap::identity() {
    return {[](double v) { return v; }, [](double) { return 1.0; }};
}

SdeModel::SdeModel(ModelKind kind, double x0)
    : kind_(kind), x0_(x0), g1_(ParamMap::identity()), g2_(ParamMap::identity()) {
    if (!valid_initial_state(x0)) {
        throw ValidationError("initial state " + std::to_string(x0) + " invalid for model " + to_string(kind));
    }
}

NoiseType SdeModel::noise() const noexcept {
    return kind_ == ModelKind::OU ? NoiseType::Additive : NoiseType::Multiplicative;
}

double SdeModel::drift_shape(double x) const noexcept {
    switch (kind_) {
        case ModelKind::OU: return -x;
        case ModelKind::GBM: return x;
        case ModelKind::Logistic: return x * (1.0 - x);
    }
    return 0.0;
}

double SdeModel::diffusion_shape(double x) const noexcept {
    return kind_ == ModelKind::OU ? 1.0 : x;
}

ModeTerm SdeModel::drift_mean_projection(double x_mean) const noexcept {
    switch (kind_) {
        case ModelKind::OU: return {-x_mean, -1.0, 0.0};
        case ModelKind::GBM: return {x_mean, 1.0, 0.0};
        case ModelKind::Logistic: return {x_mean * (1.0 - x_mean), 1.0 - 2.0 * x_mean, 0.0};
    }
    return {};
}

ModeTerm SdeModel::drift_mode_projection(double x_mode, double x_mean) const noexcept {
    switch (kind_) {
        case ModelKind::OU: return {-x_mode, -1.0, 0.0};
        case ModelKind::GBM: return {x_mode, 1.0, 0.0};
        // First-order truncation of the quadratic term around the mean.
        case ModelKind::Logistic: return {x_mode * (1.0 - 2.0 * x_mean), 1.0 - 2.0 * x_mean, -2.0 * x_mode};
    }
    return {};
}

ModeTerm SdeModel::diffusion_projection(bool is_mean, double x_mode) const noexcept {
    if (kind_ == ModelKind::OU) return {is_mean ? 1.0 : 0.0, 0.0, 0.0};
    return {x_mode, 1.0, 0.0};
}

bool SdeModel::valid_initial_state(double x) const noexcept {
    if (!std::isfinite(x)) return false;
    switch (kind_) {
        case ModelKind::OU: return true;
        case ModelKind::GBM: return x > 0.0;
        case ModelKind::Logistic: return x > 0.0 && x < 1.0;
    }
    return false;
}

SdeModel make_model(ModelKind kind, double x0) { return SdeModel(kind, x0); }

std::pair<double, double> drift_and_diffusion(const SdeModel& model, const Theta& theta, double x) {
    return {model.drift(x, theta), model.diffusion(x, theta)};
}

}  // namespace chaosfit
