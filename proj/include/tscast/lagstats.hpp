#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tscast::lagstats {

/// Partial autocorrelations by lag. values[0] is 1 by definition;
/// selected_lag is the input window length recommended for the
/// forecaster: the longest prefix of lags whose partial autocorrelations
/// all clear the 1.96/sqrt(n) significance bound (1 when none do).
struct PacfResult {
    std::vector<double> values;
    double confidence_bound = 0.0;
    int selected_lag = 1;
};

/// Biased autocorrelation of the mean-centered series for lags
/// 0..max_lag. Throws LagTooLarge unless max_lag < n/2, DegenerateSeries
/// on zero variance.
std::vector<double> acf(std::span<const double> x, int max_lag);

/// Durbin-Levinson recursion on the sample autocorrelations.
PacfResult pacf(std::span<const double> x, int max_lag);

}  // namespace tscast::lagstats
