#include "chaosfit/sim_stats.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "chaosfit/error.hpp"

namespace chaosfit {

void TrajectorySet::validate() const {
    if (paths.empty()) throw ValidationError("trajectory set is empty");
    for (std::size_t k = 0; k < paths.size(); ++k) {
        if (paths[k].size() != grid.size()) {
            throw ValidationError("path " + std::to_string(k + 1) + " has " + std::to_string(paths[k].size()) +
                                  " points, grid has " + std::to_string(grid.size()));
        }
        for (std::size_t i = 0; i < paths[k].size(); ++i) {
            if (!std::isfinite(paths[k][i])) {
                throw ValidationError("path " + std::to_string(k + 1) + " is non-finite at index " +
                                      std::to_string(i));
            }
        }
    }
}

namespace {

constexpr std::uint64_t kRetryStride = 0x9E3779B97F4A7C15ULL;
constexpr int kMaxAttemptsPerPath = 64;

bool in_domain(ModelKind kind, double x) {
    return kind != ModelKind::Logistic || (x > 0.0 && x < 1.5);
}

// Returns false if the path left the model's admissible domain.
bool simulate_path(const SdeModel& model, const Theta& theta, const TimeGrid& grid, std::uint64_t stream,
                   Series& out) {
    std::mt19937_64 rng(stream);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);
    out.assign(grid.size(), 0.0);
    double x = model.x0();
    out[0] = x;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const auto [f, s] = drift_and_diffusion(model, theta, x);
        x += f * dt + s * sqrt_dt * normal(rng);
        if (!std::isfinite(x)) {
            std::ostringstream os;
            os << "Euler-Maruyama state became non-finite at t=" << grid.at(i);
            throw NumericalError(os.str());
        }
        if (!in_domain(model.kind(), x)) return false;
        out[i] = x;
    }
    return true;
}

}  // namespace

SimulationReport euler_maruyama(const SdeModel& model, const Theta& theta, const TimeGrid& grid, std::size_t N,
                                std::uint64_t seed) {
    if (N == 0) throw ValidationError("number of paths must be >= 1");
    SimulationReport report{TrajectorySet{grid, std::vector<Series>(N), seed}, 0};
    for (std::size_t k = 0; k < N; ++k) {
        const std::uint64_t base = seed ^ static_cast<std::uint64_t>(k);
        int attempt = 0;
        while (!simulate_path(model, theta, grid, base + kRetryStride * static_cast<std::uint64_t>(attempt),
                              report.set.paths[k])) {
            ++report.rejected;
            if (++attempt >= kMaxAttemptsPerPath) {
                throw NumericalError("path " + std::to_string(k + 1) + " left the state domain on every redraw");
            }
        }
    }
    if (static_cast<double>(report.rejected) > 0.01 * static_cast<double>(N)) {
        throw NumericalError("Euler-Maruyama rejection rate too high: " + std::to_string(report.rejected) +
                             " redraws for " + std::to_string(N) + " paths");
    }
    return report;
}

Series quadratic_variation(std::span<const double> path, const TimeGrid& grid) {
    if (path.size() != grid.size()) throw ValidationError("path length does not match grid");
    Series qv(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const double d = path[i] - path[i - 1];
        qv[i] = qv[i - 1] + d * d;
    }
    return qv;
}

Series energy(std::span<const double> path, const TimeGrid& grid) {
    if (path.size() != grid.size()) throw ValidationError("path length does not match grid");
    const double half_dt = 0.5 * grid.dt();
    Series e(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) {
        e[i] = e[i - 1] + half_dt * (path[i] * path[i] + path[i - 1] * path[i - 1]);
    }
    return e;
}

Series mean_trajectory(const TrajectorySet& set) {
    if (set.paths.empty()) throw ValidationError("trajectory set is empty");
    Series mean(set.grid.size(), 0.0);
    for (const auto& p : set.paths) {
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += p[i];
    }
    const double inv = 1.0 / static_cast<double>(set.paths.size());
    for (auto& v : mean) v *= inv;
    return mean;
}

QvStats compute_qv_stats(const TrajectorySet& set, NoiseType noise) {
    set.validate();
    QvStats st;
    const std::size_t n = set.grid.size();
    st.mean_ratio.assign(n, 0.0);
    for (const auto& p : set.paths) {
        st.qv.push_back(quadratic_variation(p, set.grid));
        st.energy.push_back(energy(p, set.grid));
        Series r(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            if (st.energy.back()[i] > 0.0) r[i] = st.qv.back()[i] / st.energy.back()[i];
        }
        for (std::size_t i = 0; i < n; ++i) st.mean_ratio[i] += r[i];
        st.ratio.push_back(std::move(r));
    }
    for (auto& v : st.mean_ratio) v /= static_cast<double>(set.paths.size());
    st.sigma_tilde = sigma_tilde(set, noise);
    return st;
}

double sigma_tilde(const TrajectorySet& set, NoiseType noise) {
    set.validate();
    double acc = 0.0;
    for (std::size_t k = 0; k < set.paths.size(); ++k) {
        const double qv_T = quadratic_variation(set.paths[k], set.grid).back();
        if (noise == NoiseType::Additive) {
            acc += qv_T / set.grid.horizon();
        } else {
            const double e_T = energy(set.paths[k], set.grid).back();
            if (!(e_T > 0.0)) throw ValidationError("path " + std::to_string(k + 1) + " has zero energy");
            acc += qv_T / e_T;
        }
    }
    return std::sqrt(acc / static_cast<double>(set.paths.size()));
}

}  // namespace chaosfit
