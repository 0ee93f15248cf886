#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tscast/rng.hpp"

namespace tscast::lstm {

// Gate order used everywhere parameters are stored or iterated.
enum Gate : std::size_t { kInput = 0, kForget = 1, kCell = 2, kOutput = 3 };

/// One recurrent layer's parameters. Weight matrices are row-major,
/// hidden_dim x input_dim for w and hidden_dim x hidden_dim for u.
struct LayerParams {
    std::size_t input_dim = 0;
    std::size_t hidden_dim = 0;
    std::array<std::vector<double>, 4> w;
    std::array<std::vector<double>, 4> u;
    std::array<std::vector<double>, 4> b;
};

using FeatureSequence = std::vector<std::vector<double>>;  // T x input_dim

struct Sample {
    FeatureSequence sequence;
    double target = 0.0;
};

/// Stacked LSTM with a scalar dense head. Inference is deterministic;
/// dropout (inverted scaling) applies to the last recurrent layer's
/// output only while training.
struct Network {
    std::vector<LayerParams> layers;
    std::vector<double> dense_w;
    double dense_b = 0.0;
    double dropout_rate = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t version = 0;  // bumped on every parameter update

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().input_dim; }
    std::size_t output_hidden_dim() const { return layers.empty() ? 0 : layers.back().hidden_dim; }

    /// Seeded uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) weights, zero
    /// biases except the forget gate bias at 1.
    static Network create(std::size_t input_dim, const std::vector<std::size_t>& hidden_dims,
                          double dropout_rate, std::uint64_t seed);
};

struct LayerCache {
    std::vector<std::vector<double>> inputs;
    std::array<std::vector<std::vector<double>>, 4> gates;  // post-nonlinearity
    std::vector<std::vector<double>> cell;
    std::vector<std::vector<double>> cell_tanh;
    std::vector<std::vector<double>> hidden;
};

struct SampleCache {
    std::vector<LayerCache> layers;
    std::vector<double> dropout_mask;  // includes the 1/(1-rate) scale; empty when unused
    std::vector<double> head_input;
    double prediction = 0.0;
};

struct ForwardCache {
    std::vector<SampleCache> samples;
    bool training = false;
    std::uint64_t net_version = 0;
};

/// Parameter-shaped gradient container.
struct Gradients {
    std::vector<LayerParams> layers;
    std::vector<double> dense_w;
    double dense_b = 0.0;

    static Gradients zeros_like(const Network& net);
};

/// Runs the gate recurrences over each sequence and returns one scalar
/// prediction per sequence. With training=true an rng must be supplied
/// for the dropout masks; pass a cache to enable backward().
std::vector<double> forward(const Network& net, const std::vector<FeatureSequence>& batch,
                            bool training, Rng* rng, ForwardCache* cache = nullptr);

/// Inference-only forward; consumes no randomness.
std::vector<double> predict(const Network& net, const std::vector<FeatureSequence>& batch);
double predict_one(const Network& net, const FeatureSequence& sequence);

/// Mean-squared-error gradients for every parameter via backprop through
/// time. The cache must come from a forward pass on the same network
/// version (StaleCache otherwise).
Gradients backward(const Network& net, const ForwardCache& cache,
                   std::span<const double> targets);

double mse_loss(std::span<const double> predictions, std::span<const double> targets);

struct AdamState {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step_count = 0;
    Gradients first_moment;
    Gradients second_moment;

    static AdamState create(const Network& net, double learning_rate = 0.001,
                            double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);
};

/// Bias-corrected Adam update of a single tensor; step is the 1-based
/// step count.
void adam_update(std::span<double> param, std::span<const double> grad, std::span<double> m,
                 std::span<double> v, std::uint64_t step, double lr, double beta1, double beta2,
                 double epsilon);

/// Applies one Adam step to every tensor of the network.
void adam_step(Network& net, const Gradients& grads, AdamState& state);

struct TrainConfig {
    int epochs = 10;
    std::size_t batch_size = 32;
    int sequence_length = 0;  // informational; samples carry their own length
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
};

struct TrainResult {
    std::vector<double> loss_trace;  // one mean MSE per epoch
};

/// Mini-batch Adam on MSE for exactly cfg.epochs epochs. Incomplete
/// trailing batches are dropped; (seed, config, data) fully determines
/// the parameter trajectory.
TrainResult train(Network& net, const std::vector<Sample>& data, const TrainConfig& cfg);

/// Versioned binary checkpoint; write-then-read round-trips bit-exactly.
void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace tscast::lstm
