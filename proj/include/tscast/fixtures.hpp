#pragma once

#include <cstdint>
#include <string>

#include "tscast/pipeline.hpp"

namespace tscast::fixtures {

/// 5-minute bars of trend + daily and intraday seasonal components +
/// Gaussian noise; the standard synthetic evaluation series.
pipeline::BarSeries standard_series(std::size_t n = 5000, std::uint64_t seed = 42);

/// Bars whose closes follow an AR(1) process around a fixed level.
pipeline::BarSeries ar1_series(std::size_t n = 4000, double phi = 0.8,
                               std::uint64_t seed = 7);

/// Bars whose closes are a sine wave plus Gaussian noise.
pipeline::BarSeries sine_noise_series(std::size_t n = 2048, double period = 64.0,
                                      double sigma = 0.1, std::uint64_t seed = 3);

/// Constant closes (degenerate series edge cases).
pipeline::BarSeries constant_series(std::size_t n = 1024, double value = 100.0);

void write_bar_csv(const pipeline::BarSeries& bars, const std::string& path);

}  // namespace tscast::fixtures
