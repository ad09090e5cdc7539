#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>

namespace chaosfit {

using Vec2 = std::array<double, 2>;

/// (theta1, theta2): drift parameter and diffusion parameter.
struct Theta {
    double drift = 0.0;
    double diffusion = 0.0;

    Vec2 as_vec() const noexcept { return {drift, diffusion}; }
    static Theta from_vec(const Vec2& v) noexcept { return {v[0], v[1]}; }
    friend bool operator==(const Theta&, const Theta&) = default;
};

/// Compact parameter box; descent iterates are projected onto it.
struct ParamBox {
    double drift_lo = 1e-6;
    double drift_hi = 10.0;
    double diffusion_lo = 1e-6;
    double diffusion_hi = 5.0;

    bool contains(const Theta& t) const noexcept;
    Theta project(const Theta& t) const noexcept;
    void validate() const;
};

enum class ModelKind { OU, GBM, Logistic };
enum class NoiseType { Additive, Multiplicative };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

/// A scalar parameter map g(theta) with its derivative.
struct ParamMap {
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    static ParamMap identity();
};

/// Value of a chaos-projected term and its partials in the coefficients it reads.
struct ModeTerm {
    double value = 0.0;
    double d_self = 0.0;  // w.r.t. the mode's own coefficient
    double d_mean = 0.0;  // w.r.t. X_0 (zero for the mean mode itself)
};

/**
 * Scalar SDE dX = F(X) g1(theta1) dt + Gamma(X) g2(theta2) dB with the
 * parameter-separated structure. Immutable after construction.
 *
 * Besides pointwise F and Gamma, the model supplies the chaos projections the
 * propagator needs: the projection F_m of the drift shape onto mode m
 * (linearized in the fluctuations for the logistic drift) and the projection
 * Gamma_m of the diffusion shape.
 */
class SdeModel {
public:
    SdeModel(ModelKind kind, double x0);

    ModelKind kind() const noexcept { return kind_; }
    double x0() const noexcept { return x0_; }
    NoiseType noise() const noexcept;

    double drift_shape(double x) const noexcept;
    double diffusion_shape(double x) const noexcept;
    const ParamMap& g1() const noexcept { return g1_; }
    const ParamMap& g2() const noexcept { return g2_; }

    double drift(double x, const Theta& theta) const { return drift_shape(x) * g1_.value(theta.drift); }
    double diffusion(double x, const Theta& theta) const {
        return diffusion_shape(x) * g2_.value(theta.diffusion);
    }

    /// F projected onto the zero mode, as a function of X_0.
    ModeTerm drift_mean_projection(double x_mean) const noexcept;
    /// F projected onto a mode of degree >= 1.
    ModeTerm drift_mode_projection(double x_mode, double x_mean) const noexcept;
    /// Gamma projected onto a mode; `is_mean` selects the zero mode.
    ModeTerm diffusion_projection(bool is_mean, double x_mode) const noexcept;

    /// Whether x lies in the model's state domain for initial conditions.
    bool valid_initial_state(double x) const noexcept;

private:
    ModelKind kind_;
    double x0_;
    ParamMap g1_;
    ParamMap g2_;
};

SdeModel make_model(ModelKind kind, double x0);

/// (f(x; theta), sigma(x; theta)).
std::pair<double, double> drift_and_diffusion(const SdeModel& model, const Theta& theta, double x);

}  // namespace chaosfit
