#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "chaosfit/chaos_basis.hpp"
#include "chaosfit/models.hpp"
#include "chaosfit/time_grid.hpp"

namespace chaosfit {

/// Truncated mode set {alpha : alpha_i = 0 for i > K, |alpha| <= P} together
/// with the lowering couplings alpha -> alpha^-(j) the propagator needs.
class ChaosLayout {
public:
    struct Coupling {
        unsigned slot;       // j, 1-based
        double weight;       // sqrt(alpha_j)
        std::size_t lower;   // position of alpha^-(j) in modes()
    };

    ChaosLayout(unsigned K, unsigned P);

    unsigned basis_count() const noexcept { return K_; }
    unsigned order() const noexcept { return P_; }
    std::size_t size() const noexcept { return modes_.size(); }
    const std::vector<MultiIndex>& modes() const noexcept { return modes_; }
    const std::vector<Coupling>& couplings(std::size_t mode) const { return couplings_.at(mode); }
    std::optional<std::size_t> find(const MultiIndex& m) const;

private:
    unsigned K_;
    unsigned P_;
    std::vector<MultiIndex> modes_;
    std::vector<std::vector<Coupling>> couplings_;
    std::map<MultiIndex, std::size_t> position_;
};

/// Chaos coefficients X_m(t) on a grid, one series per mode of the layout.
class ChaosCoefficients {
public:
    ChaosCoefficients(TimeGrid grid, BasisSet basis, ChaosLayout layout);

    const TimeGrid& grid() const noexcept { return grid_; }
    const BasisSet& basis() const noexcept { return basis_; }
    const ChaosLayout& layout() const noexcept { return layout_; }
    unsigned order() const noexcept { return layout_.order(); }
    std::size_t mode_count() const noexcept { return layout_.size(); }
    const std::vector<MultiIndex>& modes() const noexcept { return layout_.modes(); }

    std::span<const double> series(std::size_t mode) const;
    std::span<double> series(std::size_t mode);
    /// Throws ValidationError if m is not part of the truncation.
    std::span<const double> series(const MultiIndex& m) const;

private:
    TimeGrid grid_;
    BasisSet basis_;
    ChaosLayout layout_;
    std::vector<double> table_;  // mode-major, grid().size() values per mode
};

/// dX_m / d theta_j for every mode, on the same grid as the coefficients.
class Sensitivities {
public:
    Sensitivities(std::size_t modes, std::size_t points);

    std::size_t mode_count() const noexcept { return modes_; }
    std::size_t point_count() const noexcept { return points_; }
    /// param 0 = theta1 (drift), 1 = theta2 (diffusion).
    std::span<const double> series(int param, std::size_t mode) const;
    std::span<double> series(int param, std::size_t mode);

private:
    std::size_t modes_;
    std::size_t points_;
    std::vector<double> table_;
};

struct PropagationResult {
    ChaosCoefficients coeffs;
    std::optional<Sensitivities> sens;
};

/**
 * Solves the propagator system for the chaos coefficients with classical RK4
 * on the data grid. Modes are visited in increasing degree inside every stage
 * evaluation, and with `with_sensitivities` the forward sensitivity equations
 * (the mode equations differentiated in theta) are advanced in the same pass,
 * which makes them the exact derivative of the discrete solution.
 *
 * Throws NumericalError naming the mode and time if the state goes
 * non-finite.
 */
PropagationResult propagate_system(const SdeModel& model, const Theta& theta, const TimeGrid& grid,
                                   const BasisSet& basis, unsigned P, bool with_sensitivities);

ChaosCoefficients propagate(const SdeModel& model, const Theta& theta, const TimeGrid& grid,
                            const BasisSet& basis, unsigned P);

/// E[X(t)] = X_0(t).
Series wce_mean(const ChaosCoefficients& coeffs);
/// Var X(t) = sum over |m| >= 1 of X_m(t)^2.
Series wce_variance(const ChaosCoefficients& coeffs);
/// Sample path sum_m X_m(t) xi_m for one Gaussian draw.
Series reconstruct_path(const ChaosCoefficients& coeffs, const GaussianDraw& draw);

}  // namespace chaosfit
