#include "tscast/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tscast/errors.hpp"
#include "tscast/lagstats.hpp"
#include "tscast/ssa.hpp"
#include "tscast/wavelet.hpp"

namespace tscast::pipeline {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

// days since 1970-01-01 for a proleptic Gregorian civil date
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

// epoch seconds or ISO-8601 ("YYYY-MM-DD[T ]HH:MM[:SS][Z]")
bool parse_timestamp(const std::string& raw, std::int64_t& out) {
    const std::string s = trim(raw);
    if (s.empty()) return false;
    if (s.find('-') == std::string::npos) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size() || !std::isfinite(v)) return false;
        out = static_cast<std::int64_t>(v);
        return true;
    }
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    int n = std::sscanf(s.c_str(), "%d-%d-%d%*1[T ]%d:%d:%d", &y, &mo, &d, &h, &mi, &sec);
    if (n < 3) return false;
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 ||
        sec < 0 || sec > 60) {
        return false;
    }
    out = days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + sec;
    return true;
}

}  // namespace

BarSeries ingest_csv(const std::string& path, const CsvSchema& schema,
                     IngestDiagnostics* diagnostics) {
    std::ifstream is(path);
    if (!is) throw EmptyFile("cannot open input file: " + path);

    std::string line;
    if (!std::getline(is, line)) throw EmptyFile("file has no header row: " + path);
    const auto header = split_csv_line(line);

    auto find_col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        throw MissingColumn("column '" + name + "' not found in " + path);
    };
    const std::size_t c_ts = find_col(schema.timestamp);
    const std::size_t c_open = find_col(schema.open);
    const std::size_t c_high = find_col(schema.high);
    const std::size_t c_low = find_col(schema.low);
    const std::size_t c_close = find_col(schema.close);
    const std::size_t c_vol = find_col(schema.volume);
    const std::size_t need = std::max({c_ts, c_open, c_high, c_low, c_close, c_vol});

    BarSeries bars;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() <= need) {
            throw UnparseableRow("line " + std::to_string(line_no) + ": expected at least " +
                                 std::to_string(need + 1) + " columns");
        }
        std::int64_t ts = 0;
        double o = 0, h = 0, l = 0, c = 0, v = 0;
        if (!parse_timestamp(cells[c_ts], ts) || !parse_double(cells[c_open], o) ||
            !parse_double(cells[c_high], h) || !parse_double(cells[c_low], l) ||
            !parse_double(cells[c_close], c) || !parse_double(cells[c_vol], v)) {
            throw UnparseableRow("line " + std::to_string(line_no) + ": unparseable cell");
        }
        if (l > std::min(o, c) || h < std::max(o, c) || l > h) {
            if (diagnostics) {
                diagnostics->dropped_rows.push_back(
                    {line_no, "OHLC ordering violated (low <= open,close <= high)"});
            }
            continue;
        }
        bars.timestamps.push_back(ts);
        bars.open.push_back(o);
        bars.high.push_back(h);
        bars.low.push_back(l);
        bars.close.push_back(c);
        bars.volume.push_back(v);
    }
    if (bars.size() < 2) throw EmptyFile("fewer than two valid rows in " + path);
    for (std::size_t i = 1; i < bars.size(); ++i) {
        if (bars.timestamps[i] <= bars.timestamps[i - 1]) {
            throw NonMonotoneTimestamps("timestamps not strictly increasing at row " +
                                        std::to_string(i + 1));
        }
    }
    return bars;
}

int horizon_steps(Horizon h) {
    switch (h) {
        case Horizon::Short: return 12;
        case Horizon::Medium: return 36;
        case Horizon::Long: return 72;
    }
    return 12;
}

std::string to_string(Denoiser d) {
    switch (d) {
        case Denoiser::None: return "none";
        case Denoiser::DropoutOnly: return "dropout-only";
        case Denoiser::Wavelet: return "wavelet";
        case Denoiser::Ssa: return "ssa";
    }
    return "none";
}

std::string to_string(Horizon h) {
    switch (h) {
        case Horizon::Short: return "short";
        case Horizon::Medium: return "medium";
        case Horizon::Long: return "long";
    }
    return "short";
}

std::string variant_name(Denoiser d) {
    switch (d) {
        case Denoiser::None: return "LSTM";
        case Denoiser::DropoutOnly: return "Dropout-LSTM";
        case Denoiser::Ssa: return "SSA-LSTM";
        case Denoiser::Wavelet: return "WT-LSTM";
    }
    return "LSTM";
}

std::optional<Denoiser> denoiser_from_string(const std::string& s) {
    if (s == "none" || s == "lstm") return Denoiser::None;
    if (s == "dropout-only" || s == "dropout") return Denoiser::DropoutOnly;
    if (s == "wavelet" || s == "wt") return Denoiser::Wavelet;
    if (s == "ssa") return Denoiser::Ssa;
    return std::nullopt;
}

std::optional<Horizon> horizon_from_string(const std::string& s) {
    if (s == "short" || s == "1h") return Horizon::Short;
    if (s == "medium" || s == "3h") return Horizon::Medium;
    if (s == "long" || s == "6h") return Horizon::Long;
    return std::nullopt;
}

FeatureDataset build_features(const BarSeries& bars, const std::vector<double>* smoothed,
                              int lag, std::size_t test_count) {
    const std::size_t n = bars.size();
    if (lag < 1) throw SeriesTooShortForLag("lag must be >= 1");
    if (static_cast<std::size_t>(lag) > n - 1) {
        throw SeriesTooShortForLag("lag " + std::to_string(lag) + " too large for " +
                                   std::to_string(n) + " bars");
    }
    if (smoothed && smoothed->size() != n) {
        throw LengthMismatch("smoothed series length " + std::to_string(smoothed->size()) +
                             " != bar count " + std::to_string(n));
    }

    const std::size_t dims = smoothed ? 2 : 4;
    auto feature_at = [&](std::size_t t, std::size_t dim) {
        if (smoothed) {
            return dim == 0 ? (*smoothed)[t] : bars.volume[t];
        }
        switch (dim) {
            case 0: return bars.open[t];
            case 1: return bars.high[t];
            case 2: return bars.low[t];
            default: return bars.close[t];
        }
    };

    const std::size_t total = n - static_cast<std::size_t>(lag);
    if (test_count >= total) {
        throw InsufficientData("hold-out of " + std::to_string(test_count) +
                               " samples leaves no training data (total " +
                               std::to_string(total) + ")");
    }

    FeatureDataset ds;
    ds.test_count = test_count;
    ds.train_count = total - test_count;

    // Scaler statistics from training rows only: feature timesteps
    // feeding the training samples and training targets.
    const std::size_t last_train_target = static_cast<std::size_t>(lag) + ds.train_count - 1;
    ds.feature_scaler.min.assign(dims, 0.0);
    ds.feature_scaler.scale.assign(dims, 1.0);
    for (std::size_t dim = 0; dim < dims; ++dim) {
        double lo = feature_at(0, dim), hi = feature_at(0, dim);
        for (std::size_t t = 1; t < last_train_target; ++t) {
            lo = std::min(lo, feature_at(t, dim));
            hi = std::max(hi, feature_at(t, dim));
        }
        ds.feature_scaler.min[dim] = lo;
        ds.feature_scaler.scale[dim] = std::max(hi - lo, 1e-300);
    }
    {
        double lo = bars.close[static_cast<std::size_t>(lag)];
        double hi = lo;
        for (std::size_t t = static_cast<std::size_t>(lag); t <= last_train_target; ++t) {
            lo = std::min(lo, bars.close[t]);
            hi = std::max(hi, bars.close[t]);
        }
        ds.target_scaler.min.assign(1, lo);
        ds.target_scaler.scale.assign(1, std::max(hi - lo, 1e-300));
    }

    ds.samples.reserve(total);
    ds.raw_targets.reserve(total);
    ds.target_times.reserve(total);
    for (std::size_t target = static_cast<std::size_t>(lag); target < n; ++target) {
        lstm::Sample s;
        s.sequence.resize(static_cast<std::size_t>(lag));
        for (std::size_t k = 0; k < static_cast<std::size_t>(lag); ++k) {
            const std::size_t t = target - static_cast<std::size_t>(lag) + k;
            auto& vec = s.sequence[k];
            vec.resize(dims);
            for (std::size_t dim = 0; dim < dims; ++dim) {
                vec[dim] = ds.feature_scaler.transform(feature_at(t, dim), dim);
            }
        }
        s.target = ds.target_scaler.transform(bars.close[target], 0);
        ds.samples.push_back(std::move(s));
        ds.raw_targets.push_back(bars.close[target]);
        ds.target_times.push_back(bars.timestamps[target]);
    }
    return ds;
}

std::uint64_t series_hash(const BarSeries& bars) {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&](const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    mix(bars.close.data(), bars.close.size() * sizeof(double));
    mix(bars.volume.data(), bars.volume.size() * sizeof(double));
    mix(bars.timestamps.data(), bars.timestamps.size() * sizeof(std::int64_t));
    return h;
}

namespace {

struct DenoiseOutput {
    std::vector<double> smoothed;
    std::vector<double> shares;
};

std::vector<double> denoise_series(std::span<const double> x, const ExperimentConfig& cfg,
                                   std::vector<double>* shares) {
    if (cfg.denoiser == Denoiser::Wavelet) {
        if (shares) {
            const auto dec = wavelet::decompose(x, cfg.wavelet_levels);
            *shares = wavelet::band_energies(dec);
        }
        return wavelet::denoise(x, cfg.wavelet_levels);
    }
    const auto dec = ssa::decompose(x, cfg.ssa_m);
    if (shares) *shares = dec.eigenvalue_shares;
    return ssa::reconstruct(dec, ssa::select_components(dec, cfg.ssa_threshold));
}

// Denoiser fitted on the training prefix only; each later value is
// recomputed from data up to and including its own bar.
DenoiseOutput causal_denoise(const BarSeries& bars, const ExperimentConfig& cfg,
                             std::size_t train_bar_end) {
    DenoiseOutput out;
    const std::span<const double> close(bars.close);
    out.smoothed = denoise_series(close.subspan(0, train_bar_end), cfg, &out.shares);
    out.smoothed.resize(bars.size(), 0.0);
    for (std::size_t t = train_bar_end; t < bars.size(); ++t) {
        const auto sm = denoise_series(close.subspan(0, t + 1), cfg, nullptr);
        out.smoothed[t] = sm.back();
    }
    return out;
}

}  // namespace

RunResult run_experiment(const BarSeries& bars, const ExperimentConfig& cfg) {
    const std::size_t n = bars.size();
    const auto steps = static_cast<std::size_t>(horizon_steps(cfg.horizon));
    const bool denoised = cfg.denoiser == Denoiser::Wavelet || cfg.denoiser == Denoiser::Ssa;

    const auto t0 = std::chrono::steady_clock::now();

    // PACF lag from the raw closes (optionally from the smoothed series);
    // causal mode restricts the statistic to the training prefix.
    const std::size_t pacf_end = cfg.causal_denoise ? n - steps : n;
    if (pacf_end < static_cast<std::size_t>(2 * cfg.max_lag) + 2 || n < steps + 2) {
        throw InsufficientData("series too short for lag selection and hold-out");
    }

    RunResult result;
    std::vector<double> smoothed;
    if (denoised) {
        if (cfg.causal_denoise) {
            auto out = causal_denoise(bars, cfg, n - steps);
            smoothed = std::move(out.smoothed);
            result.denoiser_shares = std::move(out.shares);
        } else {
            smoothed = denoise_series(bars.close, cfg, &result.denoiser_shares);
        }
    }

    const std::vector<double>& pacf_input =
        (cfg.pacf_on_smoothed && denoised) ? smoothed : bars.close;
    const auto pacf_res =
        lagstats::pacf(std::span<const double>(pacf_input).subspan(0, pacf_end), cfg.max_lag);
    const int lag = pacf_res.selected_lag;
    result.selected_lag = lag;

    FeatureDataset ds = build_features(bars, denoised ? &smoothed : nullptr, lag, steps);
    if (ds.train_count < 500) {
        throw InsufficientData("only " + std::to_string(ds.train_count) +
                               " training samples; at least 500 required");
    }

    lstm::Network net = lstm::Network::create(
        denoised ? 2 : 4, cfg.hidden_dims,
        cfg.denoiser == Denoiser::DropoutOnly ? cfg.dropout_rate : 0.0,
        derive_seed(cfg.seed, 10));

    lstm::TrainConfig tc = cfg.train;
    tc.sequence_length = lag;
    tc.seed = derive_seed(cfg.seed, 11);
    std::vector<lstm::Sample> train_set(ds.samples.begin(),
                                        ds.samples.begin() + static_cast<std::ptrdiff_t>(ds.train_count));
    const auto trained = lstm::train(net, train_set, tc);
    result.loss_trace = trained.loss_trace;

    // one-step-ahead over the hold-out window, true lagged inputs
    std::vector<lstm::FeatureSequence> test_inputs;
    test_inputs.reserve(ds.test_count);
    for (std::size_t i = ds.train_count; i < ds.samples.size(); ++i) {
        test_inputs.push_back(ds.samples[i].sequence);
    }
    const auto norm_preds = lstm::predict(net, test_inputs);

    result.predictions.resize(ds.test_count);
    result.actuals.resize(ds.test_count);
    result.test_times.resize(ds.test_count);
    for (std::size_t i = 0; i < ds.test_count; ++i) {
        result.predictions[i] = ds.target_scaler.inverse(norm_preds[i], 0);
        result.actuals[i] = ds.raw_targets[ds.train_count + i];
        result.test_times[i] = ds.target_times[ds.train_count + i];
    }

    result.scores.variant = variant_name(cfg.denoiser);
    result.scores.horizon = cfg.horizon;
    result.scores.seed = cfg.seed;
    result.scores.data_hash = series_hash(bars);
    result.scores.report = metrics::evaluate(result.actuals, result.predictions);

    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

Comparison compare_models(const std::vector<ModelScores>& scores) {
    if (scores.empty()) throw EmptyInput("no model scores to compare");
    const ModelScores* baseline = nullptr;
    for (const auto& s : scores) {
        if (s.variant == "LSTM") baseline = &s;
        if (s.data_hash != scores.front().data_hash) {
            throw MismatchedRuns("model scores computed on different data");
        }
        if (s.horizon != scores.front().horizon) {
            throw MismatchedRuns("model scores computed on different horizons");
        }
        if (s.seed != scores.front().seed) {
            throw MismatchedRuns("model scores computed with different seeds");
        }
    }
    if (!baseline) throw MismatchedRuns("comparison requires the LSTM baseline");

    Comparison cmp;
    cmp.horizon = scores.front().horizon;
    cmp.seed = scores.front().seed;
    cmp.data_hash = scores.front().data_hash;

    auto improvement = [](double base, double v) {
        return base != 0.0 ? (base - v) / base * 100.0 : 0.0;
    };
    const std::vector<std::string> order = {"LSTM", "Dropout-LSTM", "SSA-LSTM", "WT-LSTM"};
    for (const auto& name : order) {
        for (const auto& s : scores) {
            if (s.variant != name) continue;
            Comparison::Row row;
            row.variant = s.variant;
            row.report = s.report;
            row.impr_rmse = improvement(baseline->report.rmse, s.report.rmse);
            row.impr_mae = improvement(baseline->report.mae, s.report.mae);
            row.impr_mape = improvement(baseline->report.mape, s.report.mape);
            row.impr_sdape = improvement(baseline->report.sdape, s.report.sdape);
            cmp.rows.push_back(row);
            break;
        }
    }
    return cmp;
}

std::string format_table(const Comparison& c) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-14s %14s %14s %14s %14s\n", "", "RMSE", "MAE", "MAPE",
                  "SDAPE");
    os << buf;
    for (const auto& row : c.rows) {
        std::snprintf(buf, sizeof(buf), "%-14s %14.7f %14.7f %14.7f %14.7f\n",
                      row.variant.c_str(), row.report.rmse, row.report.mae,
                      row.report.mape_fraction, row.report.sdape);
        os << buf;
    }
    return os.str();
}

}  // namespace tscast::pipeline
