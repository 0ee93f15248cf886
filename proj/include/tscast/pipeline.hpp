#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tscast/lstm.hpp"
#include "tscast/metrics.hpp"

namespace tscast::pipeline {

/// Uniformly sampled OHLCV bars with strictly increasing timestamps
/// (epoch seconds).
struct BarSeries {
    std::vector<std::int64_t> timestamps;
    std::vector<double> open;
    std::vector<double> high;
    std::vector<double> low;
    std::vector<double> close;
    std::vector<double> volume;
    double bar_interval_seconds = 300.0;

    std::size_t size() const { return timestamps.size(); }
};

struct CsvSchema {
    std::string timestamp = "timestamp";
    std::string open = "open";
    std::string high = "high";
    std::string low = "low";
    std::string close = "close";
    std::string volume = "volume";
};

struct IngestDiagnostics {
    struct DroppedRow {
        std::size_t line = 0;  // 1-based physical line in the file
        std::string reason;
    };
    std::vector<DroppedRow> dropped_rows;
};

/// Reads a header-carrying CSV of bars. Rows violating the OHLC ordering
/// are dropped and reported; non-monotone timestamps are a hard error.
/// Timestamps may be epoch seconds or ISO-8601 (UTC).
BarSeries ingest_csv(const std::string& path, const CsvSchema& schema = {},
                     IngestDiagnostics* diagnostics = nullptr);

enum class Denoiser { None, DropoutOnly, Wavelet, Ssa };
enum class Horizon { Short, Medium, Long };

/// 1h / 3h / 6h of five-minute bars.
int horizon_steps(Horizon h);
std::string to_string(Denoiser d);
std::string to_string(Horizon h);
std::string variant_name(Denoiser d);  // table row label
std::optional<Denoiser> denoiser_from_string(const std::string& s);
std::optional<Horizon> horizon_from_string(const std::string& s);

struct ExperimentConfig {
    Denoiser denoiser = Denoiser::None;
    Horizon horizon = Horizon::Short;
    int wavelet_levels = 4;
    std::size_t ssa_m = 10;
    double ssa_threshold = 0.9999;
    int max_lag = 20;
    bool pacf_on_smoothed = false;
    bool causal_denoise = false;
    std::vector<std::size_t> hidden_dims{150, 50};
    double dropout_rate = 0.2;  // applied only by the DropoutOnly variant
    lstm::TrainConfig train;
    std::uint64_t seed = 0;
};

struct MinMaxScaler {
    std::vector<double> min;
    std::vector<double> scale;  // max - min, floored to avoid division by zero

    double transform(double v, std::size_t dim) const { return (v - min[dim]) / scale[dim]; }
    double inverse(double v, std::size_t dim) const { return v * scale[dim] + min[dim]; }
};

/// Windowed supervised dataset: `lag` consecutive feature vectors per
/// sample, next close as target. Features and targets are min-max
/// normalized with statistics fitted on the training rows only (the
/// final test_count samples are held out).
struct FeatureDataset {
    std::vector<lstm::Sample> samples;      // normalized
    std::vector<double> raw_targets;        // price units, aligned with samples
    std::vector<std::int64_t> target_times;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
    MinMaxScaler feature_scaler;
    MinMaxScaler target_scaler;
};

/// Baseline variants use (open, high, low, close) per step; denoised
/// variants use (smoothed close, volume). `smoothed` must be null for
/// the former and series-length for the latter.
FeatureDataset build_features(const BarSeries& bars, const std::vector<double>* smoothed,
                              int lag, std::size_t test_count);

struct ModelScores {
    std::string variant;
    Horizon horizon = Horizon::Short;
    std::uint64_t seed = 0;
    std::uint64_t data_hash = 0;
    metrics::EvalReport report;
};

struct RunResult {
    ModelScores scores;
    int selected_lag = 0;
    std::vector<std::int64_t> test_times;
    std::vector<double> predictions;  // price units
    std::vector<double> actuals;
    std::vector<double> loss_trace;
    std::vector<double> denoiser_shares;  // SSA eigenvalue shares or wavelet band energies
    double elapsed_seconds = 0.0;         // excluded from determinism comparisons
};

std::uint64_t series_hash(const BarSeries& bars);

/// Denoise per config, pick the PACF lag, build features, hold out the
/// final horizon window, train, and evaluate one-step-ahead predictions
/// against the held-out closes.
RunResult run_experiment(const BarSeries& bars, const ExperimentConfig& cfg);

struct Comparison {
    Horizon horizon = Horizon::Short;
    std::uint64_t seed = 0;
    std::uint64_t data_hash = 0;
    struct Row {
        std::string variant;
        metrics::EvalReport report;
        double impr_rmse = 0.0;  // percent reduction vs the LSTM baseline
        double impr_mae = 0.0;
        double impr_mape = 0.0;
        double impr_sdape = 0.0;
    };
    std::vector<Row> rows;  // fixed order: LSTM, Dropout-LSTM, SSA-LSTM, WT-LSTM
};

/// Improvement percentages of each variant against the LSTM baseline.
/// All entries must share data hash, horizon and seed.
Comparison compare_models(const std::vector<ModelScores>& scores);

/// Fixed-width table in the reporting layout (rows by variant, columns
/// RMSE, MAE, MAPE, SDAPE).
std::string format_table(const Comparison& c);

}  // namespace tscast::pipeline
