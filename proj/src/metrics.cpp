#include "tscast/metrics.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "tscast/errors.hpp"

namespace tscast::metrics {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> p) {
    if (a.empty()) throw EmptyInput("no observations");
    if (a.size() != p.size()) {
        throw LengthMismatch("actual has " + std::to_string(a.size()) + " values, predicted " +
                             std::to_string(p.size()));
    }
}

std::vector<double> abs_percentage_errors(std::span<const double> a, std::span<const double> p) {
    check_lengths(a, p);
    std::vector<double> ape(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) {
            throw ZeroActual("actual value at index " + std::to_string(i) + " is zero");
        }
        ape[i] = std::abs((a[i] - p[i]) / a[i]);
    }
    return ape;
}

}  // namespace

double rmse(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = actual[i] - predicted[i];
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(actual.size()));
}

double mae(std::span<const double> actual, std::span<const double> predicted) {
    check_lengths(actual, predicted);
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        acc += std::abs(actual[i] - predicted[i]);
    }
    return acc / static_cast<double>(actual.size());
}

double mape(std::span<const double> actual, std::span<const double> predicted) {
    const auto ape = abs_percentage_errors(actual, predicted);
    double acc = 0.0;
    for (double v : ape) acc += v;
    return acc / static_cast<double>(ape.size()) * 100.0;
}

double sdape(std::span<const double> actual, std::span<const double> predicted) {
    const auto ape = abs_percentage_errors(actual, predicted);
    double mean = 0.0;
    for (double v : ape) mean += v;
    mean /= static_cast<double>(ape.size());
    double acc = 0.0;
    for (double v : ape) {
        const double d = v - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(ape.size()));
}

EvalReport evaluate(std::span<const double> actual, std::span<const double> predicted) {
    EvalReport r;
    r.rmse = rmse(actual, predicted);
    r.mae = mae(actual, predicted);
    r.mape = mape(actual, predicted);
    r.mape_fraction = r.mape / 100.0;
    r.sdape = sdape(actual, predicted);
    r.sdape_percent = r.sdape * 100.0;
    r.n = actual.size();
    return r;
}

}  // namespace tscast::metrics
