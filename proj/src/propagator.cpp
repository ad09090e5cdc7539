#include "chaosfit/propagator.hpp"

#include <cmath>
#include <sstream>

#include "chaosfit/error.hpp"

namespace chaosfit {

ChaosLayout::ChaosLayout(unsigned K, unsigned P) : K_(K), P_(P), modes_(enumerate_multiindices(K, P)) {
    for (std::size_t k = 0; k < modes_.size(); ++k) position_.emplace(modes_[k], k);
    couplings_.resize(modes_.size());
    for (std::size_t k = 0; k < modes_.size(); ++k) {
        for (const auto& [slot, power] : modes_[k].entries()) {
            const std::size_t lo = position_.at(lower(modes_[k], slot));
            couplings_[k].push_back({slot, std::sqrt(static_cast<double>(power)), lo});
        }
    }
}

std::optional<std::size_t> ChaosLayout::find(const MultiIndex& m) const {
    auto it = position_.find(m);
    if (it == position_.end()) return std::nullopt;
    return it->second;
}

ChaosCoefficients::ChaosCoefficients(TimeGrid grid, BasisSet basis, ChaosLayout layout)
    : grid_(grid), basis_(basis), layout_(std::move(layout)), table_(layout_.size() * grid_.size(), 0.0) {
    if (basis_.count() != layout_.basis_count()) {
        throw ValidationError("basis size and chaos layout disagree");
    }
}

std::span<const double> ChaosCoefficients::series(std::size_t mode) const {
    return {table_.data() + mode * grid_.size(), grid_.size()};
}

std::span<double> ChaosCoefficients::series(std::size_t mode) {
    return {table_.data() + mode * grid_.size(), grid_.size()};
}

std::span<const double> ChaosCoefficients::series(const MultiIndex& m) const {
    const auto k = layout_.find(m);
    if (!k) throw ValidationError("mode " + m.to_string() + " is outside the truncation");
    return series(*k);
}

Sensitivities::Sensitivities(std::size_t modes, std::size_t points)
    : modes_(modes), points_(points), table_(2 * modes * points, 0.0) {}

std::span<const double> Sensitivities::series(int param, std::size_t mode) const {
    return {table_.data() + (static_cast<std::size_t>(param) * modes_ + mode) * points_, points_};
}

std::span<double> Sensitivities::series(int param, std::size_t mode) {
    return {table_.data() + (static_cast<std::size_t>(param) * modes_ + mode) * points_, points_};
}

namespace {

// State layout: [X_0..X_{M-1}, dX/dtheta1 (M), dX/dtheta2 (M)].
class PropagatorRhs {
public:
    PropagatorRhs(const SdeModel& model, const Theta& theta, const BasisSet& basis, const ChaosLayout& layout,
                  bool with_sens)
        : model_(model),
          layout_(layout),
          basis_(basis),
          with_sens_(with_sens),
          M_(layout.size()),
          g1_(model.g1().value(theta.drift)),
          dg1_(model.g1().derivative(theta.drift)),
          g2_(model.g2().value(theta.diffusion)),
          dg2_(model.g2().derivative(theta.diffusion)),
          e_(basis.count()) {}

    void operator()(double t, std::span<const double> y, std::span<double> dy) {
        basis_.eval_all(t, e_);
        const double x_mean = y[0];
        for (std::size_t k = 0; k < M_; ++k) {
            const ModeTerm drift =
                k == 0 ? model_.drift_mean_projection(x_mean) : model_.drift_mode_projection(y[k], x_mean);
            double forcing = 0.0;
            double forcing_s1 = 0.0;
            double forcing_s2 = 0.0;
            for (const auto& c : layout_.couplings(k)) {
                const ModeTerm gamma = model_.diffusion_projection(c.lower == 0, y[c.lower]);
                const double we = c.weight * e_[c.slot - 1];
                forcing += we * gamma.value;
                if (with_sens_) {
                    forcing_s1 += we * gamma.d_self * y[M_ + c.lower];
                    forcing_s2 += we * gamma.d_self * y[2 * M_ + c.lower];
                }
            }
            dy[k] = g1_ * drift.value + g2_ * forcing;
            if (!with_sens_) continue;

            const double s1 = y[M_ + k];
            const double s2 = y[2 * M_ + k];
            const double s1_mean = k == 0 ? 0.0 : y[M_];
            const double s2_mean = k == 0 ? 0.0 : y[2 * M_];
            dy[M_ + k] = dg1_ * drift.value + g1_ * (drift.d_self * s1 + drift.d_mean * s1_mean) +
                         g2_ * forcing_s1;
            dy[2 * M_ + k] = g1_ * (drift.d_self * s2 + drift.d_mean * s2_mean) + dg2_ * forcing +
                             g2_ * forcing_s2;
        }
    }

private:
    const SdeModel& model_;
    const ChaosLayout& layout_;
    const BasisSet& basis_;
    bool with_sens_;
    std::size_t M_;
    double g1_, dg1_, g2_, dg2_;
    std::vector<double> e_;
};

}  // namespace

PropagationResult propagate_system(const SdeModel& model, const Theta& theta, const TimeGrid& grid,
                                   const BasisSet& basis, unsigned P, bool with_sensitivities) {
    if (std::abs(basis.horizon() - grid.horizon()) > 1e-12 * grid.horizon()) {
        throw ValidationError("basis horizon and grid horizon differ");
    }
    if (!std::isfinite(theta.drift) || !std::isfinite(theta.diffusion)) {
        throw ValidationError("non-finite parameters");
    }

    ChaosCoefficients coeffs(grid, basis, ChaosLayout(basis.count(), P));
    const std::size_t M = coeffs.mode_count();
    const std::size_t dim = with_sensitivities ? 3 * M : M;
    PropagatorRhs rhs(model, theta, coeffs.basis(), coeffs.layout(), with_sensitivities);

    std::optional<Sensitivities> sens;
    if (with_sensitivities) sens.emplace(M, grid.size());

    std::vector<double> y(dim, 0.0), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    y[0] = model.x0();

    auto store = [&](std::size_t i) {
        for (std::size_t k = 0; k < M; ++k) {
            coeffs.series(k)[i] = y[k];
            if (sens) {
                sens->series(0, k)[i] = y[M + k];
                sens->series(1, k)[i] = y[2 * M + k];
            }
        }
    };
    store(0);

    const double h = grid.dt();
    for (std::size_t i = 0; i < grid.steps(); ++i) {
        const double t = grid.at(i);
        rhs(t, y, k1);
        for (std::size_t d = 0; d < dim; ++d) tmp[d] = y[d] + 0.5 * h * k1[d];
        rhs(t + 0.5 * h, tmp, k2);
        for (std::size_t d = 0; d < dim; ++d) tmp[d] = y[d] + 0.5 * h * k2[d];
        rhs(t + 0.5 * h, tmp, k3);
        for (std::size_t d = 0; d < dim; ++d) tmp[d] = y[d] + h * k3[d];
        rhs(grid.at(i + 1), tmp, k4);
        for (std::size_t d = 0; d < dim; ++d) {
            y[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
            if (!std::isfinite(y[d])) {
                std::ostringstream os;
                os << "propagator blow-up in " << (d < M ? "mode " : "sensitivity of mode ")
                   << coeffs.modes()[d % M].to_string() << " at t=" << grid.at(i + 1);
                throw NumericalError(os.str());
            }
        }
        store(i + 1);
    }
    return {std::move(coeffs), std::move(sens)};
}

ChaosCoefficients propagate(const SdeModel& model, const Theta& theta, const TimeGrid& grid,
                            const BasisSet& basis, unsigned P) {
    return std::move(propagate_system(model, theta, grid, basis, P, false).coeffs);
}

Series wce_mean(const ChaosCoefficients& coeffs) {
    const auto s = coeffs.series(0);
    return Series(s.begin(), s.end());
}

Series wce_variance(const ChaosCoefficients& coeffs) {
    Series var(coeffs.grid().size(), 0.0);
    for (std::size_t k = 1; k < coeffs.mode_count(); ++k) {
        const auto s = coeffs.series(k);
        for (std::size_t i = 0; i < var.size(); ++i) var[i] += s[i] * s[i];
    }
    return var;
}

Series reconstruct_path(const ChaosCoefficients& coeffs, const GaussianDraw& draw) {
    if (draw.z.size() != coeffs.basis().count()) {
        throw ValidationError("draw length " + std::to_string(draw.z.size()) + " does not match basis size " +
                              std::to_string(coeffs.basis().count()));
    }
    Series path(coeffs.grid().size(), 0.0);
    for (std::size_t k = 0; k < coeffs.mode_count(); ++k) {
        const double xi = xi_sample(coeffs.modes()[k], draw);
        if (xi == 0.0) continue;
        const auto s = coeffs.series(k);
        for (std::size_t i = 0; i < path.size(); ++i) path[i] += xi * s[i];
    }
    return path;
}

}  // namespace chaosfit
