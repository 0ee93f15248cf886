#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tscast/errors.hpp"
#include "tscast/fixtures.hpp"
#include "tscast/lagstats.hpp"
#include "tscast/pipeline.hpp"
#include "tscast/ssa.hpp"
#include "tscast/version.hpp"
#include "tscast/wavelet.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace tscast;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartialFailure = 1;
constexpr int kExitIngest = 2;
constexpr int kExitCompute = 3;
constexpr int kExitUsage = 64;

void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os) throw Error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

// Config file values fill in options the user did not pass on the
// command line; explicit flags win with a notice.
struct ConfigBinder {
    struct Entry {
        std::string key;
        CLI::Option* opt;
        std::function<void(const nlohmann::json&)> apply;
    };
    std::vector<Entry> entries;

    template <typename T>
    void bind(CLI::Option* opt, const std::string& key, T& target) {
        entries.push_back({key, opt, [&target](const nlohmann::json& v) { target = v.get<T>(); }});
    }

    void apply(const nlohmann::json& cfg) const {
        for (const auto& [key, value] : cfg.items()) {
            bool known = false;
            for (const auto& e : entries) {
                if (e.key != key) continue;
                known = true;
                if (e.opt && e.opt->count() > 0) {
                    std::cerr << "notice: --" << key
                              << " given on the command line overrides the config file value\n";
                } else {
                    e.apply(value);
                }
            }
            if (!known) {
                std::cerr << "notice: ignoring unknown config key '" << key << "'\n";
            }
        }
    }
};

nlohmann::json load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open config file: " + path);
    nlohmann::json cfg;
    is >> cfg;
    if (!cfg.is_object()) throw Error("config file must hold a JSON object");
    return cfg;
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const MissingColumn*>(&e) || dynamic_cast<const UnparseableRow*>(&e) ||
        dynamic_cast<const NonMonotoneTimestamps*>(&e) || dynamic_cast<const EmptyFile*>(&e)) {
        return kExitIngest;
    }
    return kExitCompute;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string hash_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::string input;
    int max_lag = 20;
    bool pacf = true;
    bool on_smoothed = false;
    int smooth_levels = 4;
};

int cmd_analyze(const AnalyzeArgs& a) {
    pipeline::BarSeries bars;
    try {
        bars = pipeline::ingest_csv(a.input);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIngest;
    }
    try {
        std::vector<double> series = bars.close;
        if (a.on_smoothed) {
            series = wavelet::denoise(series, a.smooth_levels);
        }
        const auto res = lagstats::pacf(series, a.max_lag);
        ordered_json out;
        out["input"] = a.input;
        out["n"] = bars.size();
        out["max_lag"] = a.max_lag;
        out["confidence_bound"] = res.confidence_bound;
        out["selected_lag"] = res.selected_lag;
        ordered_json table = ordered_json::array();
        for (std::size_t k = 0; k < res.values.size(); ++k) {
            table.push_back({{"lag", k},
                             {"pacf", res.values[k]},
                             {"significant", k > 0 && std::abs(res.values[k]) > res.confidence_bound}});
        }
        out["pacf"] = table;
        std::cout << out.dump(2) << "\n";
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    }
}

// ---------------------------------------------------------------- denoise

struct DenoiseArgs {
    std::string input;
    std::string method = "wavelet";
    int levels = 4;
    std::size_t ssa_m = 10;
    double ssa_threshold = 0.9999;
    std::string padding = "symmetric";
    std::string out = "denoised.csv";
};

int cmd_denoise(const DenoiseArgs& a) {
    pipeline::BarSeries bars;
    try {
        bars = pipeline::ingest_csv(a.input);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIngest;
    }
    try {
        ordered_json sidecar;
        std::vector<double> smoothed;
        if (a.method == "wavelet") {
            const auto pad = wavelet::padding_from_string(a.padding);
            const auto dec = wavelet::decompose(bars.close, a.levels, wavelet::Filter::sym4(), pad);
            smoothed = wavelet::denoise(bars.close, a.levels, wavelet::Filter::sym4(), pad);
            sidecar["method"] = "wavelet";
            sidecar["basis"] = "sym4";
            sidecar["levels"] = a.levels;
            sidecar["padding"] = a.padding;
            sidecar["band_energies"] = wavelet::band_energies(dec);
        } else if (a.method == "ssa") {
            const auto dec = ssa::decompose(bars.close, a.ssa_m);
            const auto selected = ssa::select_components(dec, a.ssa_threshold);
            smoothed = ssa::reconstruct(dec, selected);
            sidecar["method"] = "ssa";
            sidecar["m"] = a.ssa_m;
            sidecar["threshold"] = a.ssa_threshold;
            sidecar["eigenvalue_shares"] = dec.eigenvalue_shares;
            sidecar["selected_components"] = selected;
        } else {
            std::cerr << "error: unknown denoise method '" << a.method << "'\n";
            return kExitUsage;
        }

        std::ostringstream csv;
        csv << "timestamp,raw_close,smoothed_close\n";
        char buf[128];
        for (std::size_t i = 0; i < bars.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n",
                          static_cast<long long>(bars.timestamps[i]), bars.close[i], smoothed[i]);
            csv << buf;
        }
        atomic_write(a.out, csv.str());
        atomic_write(a.out + ".json", sidecar.dump(2) + "\n");
        std::cout << sidecar.dump(2) << "\n";
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    }
}

// ---------------------------------------------------------------- run

struct RunArgs {
    std::string input;
    std::string variants = "all";
    std::string horizons = "all";
    std::vector<std::uint64_t> seeds;
    std::string output_dir = ".";
    int epochs = 10;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    std::vector<std::size_t> units{150, 50};
    double dropout_rate = 0.2;
    int wavelet_levels = 4;
    std::size_t ssa_m = 10;
    double ssa_threshold = 0.9999;
    int max_lag = 20;
    bool causal_denoise = false;
    bool pacf_on_smoothed = false;
    std::uint64_t default_seed = 0;
};

int cmd_run(const RunArgs& a) {
    pipeline::BarSeries bars;
    try {
        bars = pipeline::ingest_csv(a.input);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIngest;
    }

    std::vector<pipeline::Denoiser> variants;
    if (a.variants == "all") {
        variants = {pipeline::Denoiser::None, pipeline::Denoiser::DropoutOnly,
                    pipeline::Denoiser::Ssa, pipeline::Denoiser::Wavelet};
    } else {
        for (const auto& name : split_list(a.variants)) {
            const auto d = pipeline::denoiser_from_string(name);
            if (!d) {
                std::cerr << "error: unknown variant '" << name << "'\n";
                return kExitUsage;
            }
            variants.push_back(*d);
        }
    }
    std::vector<pipeline::Horizon> horizons;
    if (a.horizons == "all") {
        horizons = {pipeline::Horizon::Short, pipeline::Horizon::Medium, pipeline::Horizon::Long};
    } else {
        for (const auto& name : split_list(a.horizons)) {
            const auto h = pipeline::horizon_from_string(name);
            if (!h) {
                std::cerr << "error: unknown horizon '" << name << "'\n";
                return kExitUsage;
            }
            horizons.push_back(*h);
        }
    }
    if (variants.empty() || horizons.empty()) {
        std::cerr << "error: empty variant or horizon list\n";
        return kExitUsage;
    }
    std::vector<std::uint64_t> seeds = a.seeds;
    if (seeds.empty()) seeds.push_back(a.default_seed);

    ordered_json runs = ordered_json::array();
    ordered_json timings = ordered_json::object();
    ordered_json comparisons = ordered_json::array();
    std::ostringstream tables;
    bool any_failed = false;

    for (const std::uint64_t seed : seeds) {
        for (const auto horizon : horizons) {
            std::vector<pipeline::ModelScores> scores;
            std::vector<pipeline::RunResult> results;
            for (const auto variant : variants) {
                pipeline::ExperimentConfig cfg;
                cfg.denoiser = variant;
                cfg.horizon = horizon;
                cfg.wavelet_levels = a.wavelet_levels;
                cfg.ssa_m = a.ssa_m;
                cfg.ssa_threshold = a.ssa_threshold;
                cfg.max_lag = a.max_lag;
                cfg.causal_denoise = a.causal_denoise;
                cfg.pacf_on_smoothed = a.pacf_on_smoothed;
                cfg.hidden_dims = a.units;
                cfg.dropout_rate = a.dropout_rate;
                cfg.train.epochs = a.epochs;
                cfg.train.batch_size = a.batch_size;
                cfg.train.learning_rate = a.learning_rate;
                cfg.seed = seed;

                const std::string run_key = pipeline::variant_name(variant) + "/" +
                                            pipeline::to_string(horizon) + "/seed" +
                                            std::to_string(seed);
                try {
                    pipeline::RunResult r = pipeline::run_experiment(bars, cfg);
                    timings[run_key] = r.elapsed_seconds;

                    ordered_json entry;
                    entry["variant"] = r.scores.variant;
                    entry["denoiser"] = pipeline::to_string(variant);
                    entry["horizon"] = pipeline::to_string(horizon);
                    entry["horizon_steps"] = pipeline::horizon_steps(horizon);
                    entry["seed"] = seed;
                    entry["selected_lag"] = r.selected_lag;
                    entry["metrics"] = {{"rmse", r.scores.report.rmse},
                                        {"mae", r.scores.report.mae},
                                        {"mape_percent", r.scores.report.mape},
                                        {"mape_fraction", r.scores.report.mape_fraction},
                                        {"sdape_fraction", r.scores.report.sdape},
                                        {"sdape_percent", r.scores.report.sdape_percent},
                                        {"n", r.scores.report.n}};
                    entry["loss_trace"] = r.loss_trace;
                    if (!r.denoiser_shares.empty()) entry["denoiser_shares"] = r.denoiser_shares;
                    entry["test_timestamps"] = r.test_times;
                    entry["actuals"] = r.actuals;
                    entry["predictions"] = r.predictions;
                    runs.push_back(std::move(entry));

                    // plot-ready per-bar file
                    std::string variant_slug = r.scores.variant;
                    for (auto& ch : variant_slug) ch = ch == ' ' ? '-' : static_cast<char>(std::tolower(ch));
                    std::ostringstream plot;
                    plot << "timestamp,actual,predicted\n";
                    char buf[128];
                    for (std::size_t i = 0; i < r.predictions.size(); ++i) {
                        std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n",
                                      static_cast<long long>(r.test_times[i]), r.actuals[i],
                                      r.predictions[i]);
                        plot << buf;
                    }
                    atomic_write(fs::path(a.output_dir) /
                                     ("predictions_" + variant_slug + "_" +
                                      pipeline::to_string(horizon) + "_seed" +
                                      std::to_string(seed) + ".csv"),
                                 plot.str());

                    scores.push_back(r.scores);
                    results.push_back(std::move(r));
                } catch (const Error& e) {
                    any_failed = true;
                    std::cerr << "run " << run_key << " failed: " << e.what() << "\n";
                    ordered_json entry;
                    entry["variant"] = pipeline::variant_name(variant);
                    entry["horizon"] = pipeline::to_string(horizon);
                    entry["seed"] = seed;
                    entry["error"] = e.what();
                    runs.push_back(std::move(entry));
                }
            }

            if (!scores.empty() && scores.size() == variants.size()) {
                bool has_baseline = false;
                for (const auto& s : scores) has_baseline |= s.variant == "LSTM";
                if (has_baseline) {
                    const auto cmp = pipeline::compare_models(scores);
                    ordered_json jc;
                    jc["horizon"] = pipeline::to_string(horizon);
                    jc["seed"] = seed;
                    ordered_json rows = ordered_json::array();
                    for (const auto& row : cmp.rows) {
                        rows.push_back({{"variant", row.variant},
                                        {"rmse", row.report.rmse},
                                        {"mae", row.report.mae},
                                        {"mape_percent", row.report.mape},
                                        {"mape_fraction", row.report.mape_fraction},
                                        {"sdape_fraction", row.report.sdape},
                                        {"improvement_rmse_pct", row.impr_rmse},
                                        {"improvement_mae_pct", row.impr_mae},
                                        {"improvement_mape_pct", row.impr_mape},
                                        {"improvement_sdape_pct", row.impr_sdape}});
                    }
                    jc["rows"] = rows;
                    comparisons.push_back(std::move(jc));

                    const std::string table = pipeline::format_table(cmp);
                    tables << "horizon " << pipeline::to_string(horizon) << ", seed " << seed
                           << "\n" << table << "\n";
                    std::cout << "horizon " << pipeline::to_string(horizon) << ", seed " << seed
                              << "\n" << table << "\n";
                }
            }
        }
    }

    ordered_json report;
    report["schema_version"] = 1;
    report["tool"] = std::string("tscast ") + kVersion;
    report["input"] = a.input;
    report["bars"] = bars.size();
    report["data_hash"] = hash_hex(pipeline::series_hash(bars));
    report["config"] = {{"variants", a.variants},
                        {"horizons", a.horizons},
                        {"seeds", seeds},
                        {"epochs", a.epochs},
                        {"batch_size", a.batch_size},
                        {"learning_rate", a.learning_rate},
                        {"units", a.units},
                        {"dropout_rate", a.dropout_rate},
                        {"wavelet_levels", a.wavelet_levels},
                        {"ssa_m", a.ssa_m},
                        {"ssa_threshold", a.ssa_threshold},
                        {"max_lag", a.max_lag},
                        {"causal_denoise", a.causal_denoise}};
    report["runs"] = runs;
    report["comparisons"] = comparisons;
    report["timings"] = timings;  // wall-clock seconds; not deterministic

    atomic_write(fs::path(a.output_dir) / "report.json", report.dump(2) + "\n");
    atomic_write(fs::path(a.output_dir) / "tables.txt", tables.str());

    return any_failed ? kExitPartialFailure : kExitOk;
}

// ---------------------------------------------------------------- fixtures

struct FixturesArgs {
    std::string output_dir = ".";
    std::string only;
};

int cmd_fixtures(const FixturesArgs& a) {
    try {
        fs::create_directories(a.output_dir);
        const auto want = [&](const char* name) { return a.only.empty() || a.only == name; };
        if (want("standard")) {
            fixtures::write_bar_csv(fixtures::standard_series(),
                                    (fs::path(a.output_dir) / "standard.csv").string());
            std::cout << "wrote standard.csv (5000 bars, seed 42)\n";
        }
        if (want("ar1")) {
            fixtures::write_bar_csv(fixtures::ar1_series(),
                                    (fs::path(a.output_dir) / "ar1.csv").string());
            std::cout << "wrote ar1.csv (4000 bars, phi 0.8, seed 7)\n";
        }
        if (want("sine")) {
            fixtures::write_bar_csv(fixtures::sine_noise_series(),
                                    (fs::path(a.output_dir) / "sine.csv").string());
            std::cout << "wrote sine.csv (2048 bars, period 64, sigma 0.1, seed 3)\n";
        }
        if (want("constant")) {
            fixtures::write_bar_csv(fixtures::constant_series(),
                                    (fs::path(a.output_dir) / "constant.csv").string());
            std::cout << "wrote constant.csv (1024 bars)\n";
        }
        return kExitOk;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"denoised LSTM forecasting for high-frequency bar data"};
    app.set_version_flag("--version", std::string("tscast ") + kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
    app.add_option("--config", config_path, "JSON file with default option values");
    auto* seed_opt = app.add_option("--seed", seed, "master random seed");
    auto* outdir_opt = app.add_option("--output-dir", output_dir, "directory for output files");

    ConfigBinder binder;
    binder.bind(seed_opt, "seed", seed);
    binder.bind(outdir_opt, "output-dir", output_dir);

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "lag statistics of the close series");
    analyze->add_option("--input", an.input, "bar CSV file")->required();
    analyze->add_flag("--pacf", an.pacf, "emit the partial autocorrelation table");
    auto* ml = analyze->add_option("--max-lag", an.max_lag, "largest lag to examine")
                   ->check(CLI::PositiveNumber);
    analyze->add_flag("--on-smoothed", an.on_smoothed,
                      "compute the statistics on a wavelet-smoothed copy");
    binder.bind(ml, "max-lag", an.max_lag);

    DenoiseArgs dn;
    auto* denoise = app.add_subcommand("denoise", "smooth the close series");
    denoise->add_option("--input", dn.input, "bar CSV file")->required();
    auto* method = denoise->add_option("--method", dn.method, "wavelet or ssa")
                       ->check(CLI::IsMember({"wavelet", "ssa"}));
    auto* levels = denoise->add_option("--levels", dn.levels, "wavelet decomposition depth")
                       ->check(CLI::Range(1, 8));
    auto* ssam = denoise->add_option("--ssa-m", dn.ssa_m, "SSA embedding dimension");
    auto* ssath = denoise->add_option("--ssa-threshold", dn.ssa_threshold,
                                      "cumulative eigenvalue share to keep")
                      ->check(CLI::Range(1e-9, 1.0));
    denoise->add_option("--padding", dn.padding, "wavelet boundary handling")
        ->check(CLI::IsMember({"symmetric", "periodic"}));
    denoise->add_option("--out", dn.out, "output CSV path");
    binder.bind(method, "method", dn.method);
    binder.bind(levels, "levels", dn.levels);
    binder.bind(ssam, "ssa-m", dn.ssa_m);
    binder.bind(ssath, "ssa-threshold", dn.ssa_threshold);

    RunArgs rn;
    auto* run = app.add_subcommand("run", "train and evaluate the model matrix");
    run->add_option("--input", rn.input, "bar CSV file")->required();
    auto* variants = run->add_option("--variants", rn.variants,
                                     "'all' or comma list: lstm,dropout,ssa,wt");
    auto* horizons = run->add_option("--horizons", rn.horizons,
                                     "'all' or comma list: short,medium,long");
    auto* seeds = run->add_option("--seeds", rn.seeds, "training seeds")->delimiter(',');
    auto* epochs = run->add_option("--epochs", rn.epochs)->check(CLI::PositiveNumber);
    auto* batch = run->add_option("--batch-size", rn.batch_size)->check(CLI::PositiveNumber);
    auto* lr = run->add_option("--learning-rate", rn.learning_rate)->check(CLI::PositiveNumber);
    auto* units = run->add_option("--units", rn.units, "LSTM layer widths")->delimiter(',');
    auto* drop = run->add_option("--dropout", rn.dropout_rate)->check(CLI::Range(0.0, 0.999));
    auto* wl = run->add_option("--levels", rn.wavelet_levels)->check(CLI::Range(1, 8));
    auto* sm = run->add_option("--ssa-m", rn.ssa_m);
    auto* st = run->add_option("--ssa-threshold", rn.ssa_threshold);
    auto* mlag = run->add_option("--max-lag", rn.max_lag)->check(CLI::PositiveNumber);
    run->add_flag("--causal-denoise", rn.causal_denoise,
                  "fit the denoiser on the training prefix only");
    run->add_flag("--pacf-on-smoothed", rn.pacf_on_smoothed,
                  "select the lag from the smoothed series");
    binder.bind(variants, "variants", rn.variants);
    binder.bind(horizons, "horizons", rn.horizons);
    binder.bind(seeds, "seeds", rn.seeds);
    binder.bind(epochs, "epochs", rn.epochs);
    binder.bind(batch, "batch-size", rn.batch_size);
    binder.bind(lr, "learning-rate", rn.learning_rate);
    binder.bind(units, "units", rn.units);
    binder.bind(drop, "dropout", rn.dropout_rate);
    binder.bind(wl, "levels", rn.wavelet_levels);
    binder.bind(sm, "ssa-m", rn.ssa_m);
    binder.bind(st, "ssa-threshold", rn.ssa_threshold);
    binder.bind(mlag, "max-lag", rn.max_lag);

    FixturesArgs fx;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "regenerate the synthetic datasets");
    fixtures_cmd->add_option("--only", fx.only, "generate a single fixture by name")
        ->check(CLI::IsMember({"standard", "ar1", "sine", "constant"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (!config_path.empty()) {
        try {
            binder.apply(load_config(config_path));
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitUsage;
        }
    }

    try {
        if (analyze->parsed()) return cmd_analyze(an);
        if (denoise->parsed()) return cmd_denoise(dn);
        if (run->parsed()) {
            rn.output_dir = output_dir;
            rn.default_seed = seed;
            return cmd_run(rn);
        }
        if (fixtures_cmd->parsed()) {
            fx.output_dir = output_dir;
            return cmd_fixtures(fx);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCompute;
    }
    return kExitUsage;
}
