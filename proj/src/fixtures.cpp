#include "tscast/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "tscast/errors.hpp"
#include "tscast/rng.hpp"

namespace tscast::fixtures {

namespace {

constexpr std::int64_t kEpochStart = 1577836800;  // 2020-01-01T00:00:00Z
constexpr std::int64_t kBarSeconds = 300;

// Builds OHLCV bars around a close path: open is the previous close,
// high/low bracket them with a small spread.
pipeline::BarSeries bars_from_closes(const std::vector<double>& closes,
                                     const std::vector<double>& volumes, Rng& rng) {
    pipeline::BarSeries b;
    const std::size_t n = closes.size();
    b.timestamps.resize(n);
    b.open.resize(n);
    b.high.resize(n);
    b.low.resize(n);
    b.close = closes;
    b.volume = volumes;
    for (std::size_t i = 0; i < n; ++i) {
        b.timestamps[i] = kEpochStart + static_cast<std::int64_t>(i) * kBarSeconds;
        b.open[i] = i == 0 ? closes[0] : closes[i - 1];
        const double spread = std::abs(rng.normal(0.0, 1.0)) + 0.01;
        b.high[i] = std::max(b.open[i], b.close[i]) + spread;
        b.low[i] = std::min(b.open[i], b.close[i]) - spread;
    }
    return b;
}

}  // namespace

pipeline::BarSeries standard_series(std::size_t n, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 100));
    std::vector<double> closes(n), volumes(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i);
        const double trend = 26000.0 + 0.04 * t;
        const double daily = 80.0 * std::sin(2.0 * M_PI * t / 288.0);
        const double intraday = 25.0 * std::sin(2.0 * M_PI * t / 48.0 + 0.9);
        closes[i] = trend + daily + intraday + rng.normal(0.0, 35.0);
        volumes[i] = std::max(
            1.0, 1500.0 + 400.0 * std::sin(2.0 * M_PI * t / 288.0 + 2.1) + rng.normal(0.0, 60.0));
    }
    return bars_from_closes(closes, volumes, rng);
}

pipeline::BarSeries ar1_series(std::size_t n, double phi, std::uint64_t seed) {
    Rng rng(derive_seed(seed, 101));
    std::vector<double> closes(n), volumes(n);
    double x = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        x = phi * x + rng.normal(0.0, 1.0);
        closes[i] = 100.0 + x;
        volumes[i] = std::max(1.0, 1000.0 + rng.normal(0.0, 40.0));
    }
    return bars_from_closes(closes, volumes, rng);
}

pipeline::BarSeries sine_noise_series(std::size_t n, double period, double sigma,
                                      std::uint64_t seed) {
    Rng rng(derive_seed(seed, 102));
    std::vector<double> closes(n), volumes(n);
    for (std::size_t i = 0; i < n; ++i) {
        closes[i] = 100.0 + std::sin(2.0 * M_PI * static_cast<double>(i) / period) +
                    rng.normal(0.0, sigma);
        volumes[i] = std::max(1.0, 1000.0 + rng.normal(0.0, 40.0));
    }
    return bars_from_closes(closes, volumes, rng);
}

pipeline::BarSeries constant_series(std::size_t n, double value) {
    pipeline::BarSeries b;
    b.timestamps.resize(n);
    b.open.assign(n, value);
    b.high.assign(n, value);
    b.low.assign(n, value);
    b.close.assign(n, value);
    b.volume.assign(n, 1000.0);
    for (std::size_t i = 0; i < n; ++i) {
        b.timestamps[i] = kEpochStart + static_cast<std::int64_t>(i) * kBarSeconds;
    }
    return b;
}

void write_bar_csv(const pipeline::BarSeries& bars, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw Error("cannot open output file: " + path);
    os << "timestamp,open,high,low,close,volume\n";
    char buf[256];
    for (std::size_t i = 0; i < bars.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%lld,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      static_cast<long long>(bars.timestamps[i]), bars.open[i], bars.high[i],
                      bars.low[i], bars.close[i], bars.volume[i]);
        os << buf;
    }
    if (!os) throw Error("write failed: " + path);
}

}  // namespace tscast::fixtures
