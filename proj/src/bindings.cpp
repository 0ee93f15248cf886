#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tscast/errors.hpp"
#include "tscast/lagstats.hpp"
#include "tscast/lstm.hpp"
#include "tscast/metrics.hpp"
#include "tscast/ssa.hpp"
#include "tscast/version.hpp"
#include "tscast/wavelet.hpp"

namespace py = pybind11;
using namespace tscast;

namespace {

wavelet::Padding padding_arg(const std::string& s) { return wavelet::padding_from_string(s); }

}  // namespace

PYBIND11_MODULE(tscast, m) {
    m.doc() = "wavelet / SSA denoising, lag statistics, LSTM forecasting and error metrics";
    m.attr("__version__") = kVersion;

    py::register_exception<Error>(m, "TscastError");

    // wavelet
    py::class_<wavelet::Decomposition>(m, "WaveletDecomposition")
        .def_readonly("approximation", &wavelet::Decomposition::approximation)
        .def_readonly("details", &wavelet::Decomposition::details)
        .def_readonly("levels", &wavelet::Decomposition::levels)
        .def_readonly("original_length", &wavelet::Decomposition::original_length);

    m.def(
        "dwt_decompose",
        [](const std::vector<double>& x, int levels, const std::string& padding) {
            return wavelet::decompose(x, levels, wavelet::Filter::sym4(), padding_arg(padding));
        },
        py::arg("x"), py::arg("levels") = 4, py::arg("padding") = "symmetric");
    m.def(
        "dwt_reconstruct",
        [](const wavelet::Decomposition& d) { return wavelet::reconstruct(d); }, py::arg("d"));
    m.def(
        "wavelet_denoise",
        [](const std::vector<double>& x, int levels, const std::string& padding) {
            return wavelet::denoise(x, levels, wavelet::Filter::sym4(), padding_arg(padding));
        },
        py::arg("x"), py::arg("levels") = 4, py::arg("padding") = "symmetric");

    // ssa
    py::class_<ssa::Decomposition>(m, "SsaDecomposition")
        .def_readonly("embedding_dim", &ssa::Decomposition::embedding_dim)
        .def_readonly("eigenvalues", &ssa::Decomposition::eigenvalues)
        .def_readonly("eigenvalue_shares", &ssa::Decomposition::eigenvalue_shares)
        .def_readonly("eigenvectors", &ssa::Decomposition::eigenvectors)
        .def_readonly("degenerate", &ssa::Decomposition::degenerate);

    m.def(
        "ssa_decompose",
        [](const std::vector<double>& x, std::size_t m_dim, bool center) {
            return ssa::decompose(x, m_dim, center);
        },
        py::arg("x"), py::arg("m") = 10, py::arg("center") = false);
    m.def("ssa_reconstruct", &ssa::reconstruct, py::arg("d"), py::arg("selected"));
    m.def("ssa_select_components", &ssa::select_components, py::arg("d"),
          py::arg("threshold") = 0.9999);
    m.def(
        "ssa_denoise",
        [](const std::vector<double>& x, std::size_t m_dim, double threshold, bool center) {
            return ssa::denoise(x, m_dim, threshold, center);
        },
        py::arg("x"), py::arg("m") = 10, py::arg("threshold") = 0.9999,
        py::arg("center") = false);

    // lag statistics
    py::class_<lagstats::PacfResult>(m, "PacfResult")
        .def_readonly("values", &lagstats::PacfResult::values)
        .def_readonly("confidence_bound", &lagstats::PacfResult::confidence_bound)
        .def_readonly("selected_lag", &lagstats::PacfResult::selected_lag);

    m.def(
        "acf", [](const std::vector<double>& x, int max_lag) { return lagstats::acf(x, max_lag); },
        py::arg("x"), py::arg("max_lag") = 20);
    m.def(
        "pacf",
        [](const std::vector<double>& x, int max_lag) { return lagstats::pacf(x, max_lag); },
        py::arg("x"), py::arg("max_lag") = 20);

    // metrics
    py::class_<metrics::EvalReport>(m, "EvalReport")
        .def_readonly("rmse", &metrics::EvalReport::rmse)
        .def_readonly("mae", &metrics::EvalReport::mae)
        .def_readonly("mape", &metrics::EvalReport::mape)
        .def_readonly("mape_fraction", &metrics::EvalReport::mape_fraction)
        .def_readonly("sdape", &metrics::EvalReport::sdape)
        .def_readonly("sdape_percent", &metrics::EvalReport::sdape_percent)
        .def_readonly("n", &metrics::EvalReport::n);

    m.def(
        "rmse",
        [](const std::vector<double>& a, const std::vector<double>& p) {
            return metrics::rmse(a, p);
        },
        py::arg("actual"), py::arg("predicted"));
    m.def(
        "mae",
        [](const std::vector<double>& a, const std::vector<double>& p) {
            return metrics::mae(a, p);
        },
        py::arg("actual"), py::arg("predicted"));
    m.def(
        "mape",
        [](const std::vector<double>& a, const std::vector<double>& p) {
            return metrics::mape(a, p);
        },
        py::arg("actual"), py::arg("predicted"));
    m.def(
        "sdape",
        [](const std::vector<double>& a, const std::vector<double>& p) {
            return metrics::sdape(a, p);
        },
        py::arg("actual"), py::arg("predicted"));
    m.def(
        "evaluate",
        [](const std::vector<double>& a, const std::vector<double>& p) {
            return metrics::evaluate(a, p);
        },
        py::arg("actual"), py::arg("predicted"));

    // lstm
    py::class_<lstm::TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("epochs", &lstm::TrainConfig::epochs)
        .def_readwrite("batch_size", &lstm::TrainConfig::batch_size)
        .def_readwrite("sequence_length", &lstm::TrainConfig::sequence_length)
        .def_readwrite("learning_rate", &lstm::TrainConfig::learning_rate)
        .def_readwrite("seed", &lstm::TrainConfig::seed);

    py::class_<lstm::Network>(m, "LstmNetwork")
        .def_static("create", &lstm::Network::create, py::arg("input_dim"),
                    py::arg("hidden_dims"), py::arg("dropout_rate") = 0.2, py::arg("seed") = 0)
        .def_property_readonly("input_dim", &lstm::Network::input_dim)
        .def_readonly("dropout_rate", &lstm::Network::dropout_rate)
        .def("predict", [](const lstm::Network& net, const lstm::FeatureSequence& seq) {
            return lstm::predict_one(net, seq);
        })
        .def("save", &lstm::save_checkpoint)
        .def_static("load", &lstm::load_checkpoint);

    m.def(
        "train_lstm",
        [](lstm::Network& net, const std::vector<std::pair<lstm::FeatureSequence, double>>& data,
           const lstm::TrainConfig& cfg) {
            std::vector<lstm::Sample> samples;
            samples.reserve(data.size());
            for (const auto& [seq, target] : data) samples.push_back({seq, target});
            return lstm::train(net, samples, cfg).loss_trace;
        },
        py::arg("network"), py::arg("samples"), py::arg("config"));
}
