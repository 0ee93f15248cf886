#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tscast/rng.hpp"

namespace testutil {

inline std::vector<double> gaussian_series(std::size_t n, std::uint64_t seed, double mean = 0.0,
                                           double sigma = 1.0) {
    tscast::Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.normal(mean, sigma);
    return x;
}

inline std::vector<double> ar_series(std::size_t n, const std::vector<double>& phi,
                                     std::uint64_t seed, double sigma = 1.0) {
    tscast::Rng rng(seed);
    std::vector<double> x(n, 0.0);
    const std::size_t burn = 200;
    std::vector<double> full(n + burn, 0.0);
    for (std::size_t t = 0; t < full.size(); ++t) {
        double v = rng.normal(0.0, sigma);
        for (std::size_t j = 0; j < phi.size(); ++j) {
            if (t > j) v += phi[j] * full[t - j - 1];
        }
        full[t] = v;
    }
    for (std::size_t t = 0; t < n; ++t) x[t] = full[t + burn];
    return x;
}

inline std::vector<double> sine_series(std::size_t n, double period, double amplitude = 1.0) {
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = amplitude * std::sin(2.0 * M_PI * static_cast<double>(t) / period);
    }
    return x;
}

inline double mse(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc / static_cast<double>(a.size());
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return worst;
}

// Gaussian elimination with partial pivoting; the brute-force linear
// solver used as an independent oracle.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t c = i + 1; c < n; ++c) acc -= a[i][c] * x[c];
        x[i] = acc / a[i][i];
    }
    return x;
}

}  // namespace testutil
