#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "chaosfit/error.hpp"

namespace chaosfit {

using Series = std::vector<double>;

/// Uniform grid 0 = t_0 < ... < t_n = T.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
        if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ValidationError("grid horizon must be > 0");
        if (steps < 2) throw ValidationError("grid needs at least 2 steps, got " + std::to_string(steps));
    }

    double horizon() const noexcept { return horizon_; }
    std::size_t steps() const noexcept { return steps_; }
    std::size_t size() const noexcept { return steps_ + 1; }
    double dt() const noexcept { return horizon_ / static_cast<double>(steps_); }
    double at(std::size_t i) const noexcept {
        return i == steps_ ? horizon_ : horizon_ * static_cast<double>(i) / static_cast<double>(steps_);
    }

    Series points() const {
        Series t(size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = at(i);
        return t;
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    double horizon_;
    std::size_t steps_;
};

/// Composite trapezoid rule over the whole grid.
inline double trapezoid(std::span<const double> f, double dt) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * dt;
}

}  // namespace chaosfit
