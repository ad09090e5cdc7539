#include <gtest/gtest.h>

#include <cmath>

#include "chaosfit/error.hpp"
#include "chaosfit/sim_stats.hpp"
#include "oracles.hpp"

using namespace chaosfit;

TEST(EulerMaruyama, DeterministicLimit) {
    const TimeGrid grid(1.0, 10000);
    const auto r = euler_maruyama(make_model(ModelKind::OU, 1.0), {1.7, 0.0}, grid, 5, 3);
    for (const auto& p : r.set.paths) {
        for (std::size_t i = 0; i < p.size(); i += 97) EXPECT_NEAR(p[i], oracle::ou_mean(1.0, 1.7, grid.at(i)), 1e-3);
    }
}

TEST(EulerMaruyama, OuMeanWithinMonteCarloError) {
    const TimeGrid grid(1.0, 1000);
    const auto r = euler_maruyama(make_model(ModelKind::OU, 1.0), {1.7, 0.15}, grid, 1000, 42);
    for (std::size_t i : {std::size_t{250}, std::size_t{500}, std::size_t{1000}}) {
        std::vector<double> x;
        for (const auto& p : r.set.paths) x.push_back(p[i]);
        const auto m = oracle::mean_se(x);
        EXPECT_LE(std::abs(m.mean - oracle::ou_mean(1.0, 1.7, grid.at(i))), 3.0 * m.se) << "t=" << grid.at(i);
    }
}

TEST(EulerMaruyama, Determinism) {
    const TimeGrid grid(1.0, 300);
    const auto m = make_model(ModelKind::Logistic, 0.1);
    const auto a = euler_maruyama(m, {0.68, 0.09}, grid, 50, 11);
    const auto b = euler_maruyama(m, {0.68, 0.09}, grid, 50, 11);
    EXPECT_EQ(a.set.paths, b.set.paths);
    EXPECT_EQ(a.rejected, b.rejected);
    const auto c = euler_maruyama(m, {0.68, 0.09}, grid, 50, 12);
    EXPECT_NE(a.set.paths, c.set.paths);
    // path k depends only on (seed, k), not on N
    const auto d = euler_maruyama(m, {0.68, 0.09}, grid, 20, 11);
    for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(d.set.paths[k], a.set.paths[k]);
    EXPECT_THROW(euler_maruyama(m, {0.68, 0.09}, grid, 0, 11), ValidationError);
}

TEST(QuadraticVariation, Examples) {
    const TimeGrid grid(1.0, 1000);
    Series lin(grid.size()), flat(grid.size(), 2.0);
    for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = grid.at(i);
    EXPECT_NEAR(quadratic_variation(lin, grid).back(), 1e-3, 1e-15);
    for (double v : quadratic_variation(flat, grid)) EXPECT_EQ(v, 0.0);

    const auto bm = euler_maruyama(make_model(ModelKind::OU, 0.0), {0.0, 0.15}, grid, 100, 5);
    double qv = 0.0;
    for (const auto& p : bm.set.paths) qv += quadratic_variation(p, grid).back();
    EXPECT_NEAR(qv / 100.0, 0.0225, 0.1 * 0.0225);
}

TEST(QuadraticVariation, MonotoneAndAdditive) {
    const TimeGrid grid(2.0, 400);
    const auto r = euler_maruyama(make_model(ModelKind::GBM, 1.0), {0.4, 0.3}, grid, 10, 8);
    for (const auto& p : r.set.paths) {
        const auto qv = quadratic_variation(p, grid);
        EXPECT_EQ(qv.front(), 0.0);
        for (std::size_t i = 1; i < qv.size(); ++i) EXPECT_GE(qv[i], qv[i - 1]);
        // QV over [0, t_m] plus QV of the tail window equals QV over [0, T]
        const std::size_t m = 150;
        const TimeGrid tail_grid(grid.horizon() - grid.at(m), grid.steps() - m);
        const auto tail = quadratic_variation(std::span<const double>(p).subspan(m), tail_grid);
        EXPECT_NEAR(qv[m] + tail.back(), qv.back(), 1e-14 * qv.back());
    }
}

TEST(Energy, Examples) {
    const TimeGrid grid(1.0, 1000);
    Series one(grid.size(), 1.0), lin(grid.size()), zero(grid.size(), 0.0);
    for (std::size_t i = 0; i < lin.size(); ++i) lin[i] = grid.at(i);
    EXPECT_NEAR(energy(one, grid).back(), 1.0, 1e-14);
    EXPECT_NEAR(energy(lin, grid).back(), 1.0 / 3.0, 1e-6);
    for (double v : energy(zero, grid)) EXPECT_EQ(v, 0.0);
}

TEST(MeanTrajectory, Examples) {
    const TimeGrid grid(1.0, 4);
    Series x{1.0, 2.0, -1.0, 0.5, 3.0}, neg(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    EXPECT_EQ(mean_trajectory({grid, {x}, std::nullopt}), x);
    for (double v : mean_trajectory({grid, {x, neg}, std::nullopt})) EXPECT_EQ(v, 0.0);
}

TEST(SigmaTilde, GbmRatioRecoversSigma) {
    const TimeGrid grid(1.0, 10000);
    const auto r = euler_maruyama(make_model(ModelKind::GBM, 1.0), {0.63, 0.06}, grid, 200, 21);
    const auto qv = compute_qv_stats(r.set, NoiseType::Multiplicative);
    EXPECT_NEAR(qv.mean_ratio.back(), 0.0036, 0.15 * 0.0036);
    EXPECT_NEAR(qv.sigma_tilde, sigma_tilde(r.set, NoiseType::Multiplicative), 1e-15);
    EXPECT_EQ(qv.mean_ratio.front(), 0.0);
}

TEST(SigmaTilde, SmoothPathVanishes) {
    const auto m = make_model(ModelKind::OU, 1.0);
    double prev = INFINITY;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        const auto r = euler_maruyama(m, {1.7, 0.0}, TimeGrid(1.0, n), 2, 1);
        const double s = sigma_tilde(r.set, NoiseType::Additive);
        EXPECT_LT(s, prev);
        prev = s;
    }
    EXPECT_LT(prev, 0.02);
}

TEST(TrajectorySet, ValidateShape) {
    const TimeGrid grid(1.0, 4);
    EXPECT_THROW((TrajectorySet{grid, {Series(3, 0.0)}, std::nullopt}.validate()), ValidationError);
    EXPECT_THROW((TrajectorySet{grid, {Series{0, 1, NAN, 3, 4}}, std::nullopt}.validate()), ValidationError);
    EXPECT_THROW((TrajectorySet{grid, {}, std::nullopt}.validate()), ValidationError);
}
