#pragma once

#include <cstddef>
#include <span>

namespace tscast::metrics {

/// The four forecast error measures. mape is on the percent scale,
/// sdape on the fraction scale; the companion fields carry the other
/// scale of each so reports can print both.
struct EvalReport {
    double rmse = 0.0;
    double mae = 0.0;
    double mape = 0.0;            // percent
    double mape_fraction = 0.0;
    double sdape = 0.0;           // fraction
    double sdape_percent = 0.0;
    std::size_t n = 0;
};

double rmse(std::span<const double> actual, std::span<const double> predicted);
double mae(std::span<const double> actual, std::span<const double> predicted);

/// Mean absolute percentage error x 100. Any zero actual value is an
/// error (skipping rows would corrupt N).
double mape(std::span<const double> actual, std::span<const double> predicted);

/// Population standard deviation of the absolute percentage errors,
/// fraction scale.
double sdape(std::span<const double> actual, std::span<const double> predicted);

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted);

}  // namespace tscast::metrics
