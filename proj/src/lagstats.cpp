#include "tscast/lagstats.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "tscast/errors.hpp"

namespace tscast::lagstats {

std::vector<double> acf(std::span<const double> x, int max_lag) {
    const std::size_t n = x.size();
    if (max_lag < 1 || static_cast<std::size_t>(2 * max_lag) >= n) {
        throw LagTooLarge("max_lag " + std::to_string(max_lag) +
                          " must satisfy 1 <= max_lag < n/2 for n = " + std::to_string(n));
    }
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    std::vector<double> c(static_cast<std::size_t>(max_lag) + 1, 0.0);
    for (int d = 0; d <= max_lag; ++d) {
        double acc = 0.0;
        for (std::size_t t = 0; t + static_cast<std::size_t>(d) < n; ++t) {
            acc += (x[t] - mean) * (x[t + static_cast<std::size_t>(d)] - mean);
        }
        c[static_cast<std::size_t>(d)] = acc / static_cast<double>(n);
    }
    if (c[0] <= 0.0) {
        throw DegenerateSeries("series has zero variance");
    }
    std::vector<double> r(c.size());
    for (std::size_t d = 0; d < c.size(); ++d) r[d] = c[d] / c[0];
    r[0] = 1.0;
    return r;
}

PacfResult pacf(std::span<const double> x, int max_lag) {
    const std::vector<double> r = acf(x, max_lag);
    const auto lags = static_cast<std::size_t>(max_lag);

    PacfResult res;
    res.values.assign(lags + 1, 0.0);
    res.values[0] = 1.0;
    res.confidence_bound = 1.96 / std::sqrt(static_cast<double>(x.size()));

    // Durbin-Levinson: phi[j] holds the AR(k) coefficients at order k.
    std::vector<double> phi(lags + 1, 0.0);
    std::vector<double> prev(lags + 1, 0.0);
    double err = 1.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        double num = r[k];
        for (std::size_t j = 1; j < k; ++j) num -= prev[j] * r[k - j];
        const double pk = err > 0.0 ? num / err : 0.0;
        phi[k] = pk;
        for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - pk * prev[k - j];
        err *= (1.0 - pk * pk);
        res.values[k] = pk;
        prev = phi;
    }

    // Longest all-significant prefix of lags; a pure AR(p) process cuts
    // off here at p while isolated sampling blips at higher lags are
    // ignored.
    int selected = 0;
    for (std::size_t k = 1; k <= lags; ++k) {
        if (std::abs(res.values[k]) > res.confidence_bound) {
            selected = static_cast<int>(k);
        } else {
            break;
        }
    }
    res.selected_lag = selected >= 1 ? selected : 1;
    return res;
}

}  // namespace tscast::lagstats
