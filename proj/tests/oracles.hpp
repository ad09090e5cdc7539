#pragma once

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Gauss-Hermite rule for the standard normal weight (Golub-Welsch).
/// Returns (nodes, weights) with weights summing to 1.
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        J(k - 1, k) = std::sqrt(static_cast<double>(k));
        J(k, k - 1) = J(k - 1, k);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        x[i] = es.eigenvalues()(i);
        w[i] = es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
    }
    return {x, w};
}

/// Probabilists' Hermite He_n by the monic recurrence, divided by sqrt(n!).
inline double hermite_normalized(unsigned n, double x) {
    double prev = 1.0, cur = x;
    if (n == 0) return 1.0;
    for (unsigned k = 1; k < n; ++k) {
        const double next = x * cur - static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur / std::sqrt(std::tgamma(static_cast<double>(n) + 1.0));
}

inline double ou_mean(double x0, double a, double t) { return x0 * std::exp(-a * t); }

/// sigma * int_0^t exp(-a (t - s)) e_i(s) ds for the cosine basis on [0, T].
inline double ou_first_order(double a, double sigma, double T, unsigned i, double t) {
    if (i == 1) return sigma / std::sqrt(T) * (1.0 - std::exp(-a * t)) / a;
    const double w = static_cast<double>(i - 1) * std::numbers::pi / T;
    const double c = std::sqrt(2.0 / T);
    return sigma * c * (a * std::cos(w * t) + w * std::sin(w * t) - a * std::exp(-a * t)) / (a * a + w * w);
}

inline double ou_variance(double a, double sigma, double t) {
    return sigma * sigma * (1.0 - std::exp(-2.0 * a * t)) / (2.0 * a);
}

inline double logistic_mean(double p0, double r, double t) {
    return 1.0 / (1.0 + (1.0 - p0) / p0 * std::exp(-r * t));
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s2 = 0.0;
    for (double x : v) s2 += (x - m) * (x - m);
    s2 /= static_cast<double>(v.size() - 1);
    return {m, std::sqrt(s2 / static_cast<double>(v.size()))};
}

}  // namespace oracle
